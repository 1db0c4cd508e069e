#pragma once

#include <filesystem>
#include <string>

#include <httplib.h>

#include "annotation.hpp"

namespace persuade {

namespace detail {
inline void reply(httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body, r.content_type);
}
}  // namespace detail

/// Routes:
///   GET  /tasks/next?annotator=ID
///   POST /answers
///   GET  /progress
///   GET  /export      (CSV)
///   GET  /summary[?agent_a=ID]
/// Every response carries permissive CORS headers. When `static_dir` is set
/// it is served at "/" for the annotation UI bundle.
inline void mount(httplib::Server& server, AnnotationService& service,
                  const std::optional<std::filesystem::path>& static_dir = {}) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/tasks/next", [&service](const httplib::Request& req, httplib::Response& res) {
        detail::reply(res, service.next_task(req.get_param_value("annotator")));
    });
    server.Post("/answers", [&service](const httplib::Request& req, httplib::Response& res) {
        detail::reply(res, service.post_answer(req.body));
    });
    server.Get("/progress", [&service](const httplib::Request&, httplib::Response& res) {
        detail::reply(res, service.progress());
    });
    server.Get("/export", [&service](const httplib::Request&, httplib::Response& res) {
        detail::reply(res, service.export_result());
    });
    server.Get("/summary", [&service](const httplib::Request& req, httplib::Response& res) {
        detail::reply(res, service.summary_result(req.get_param_value("agent_a")));
    });
    if (static_dir && !server.set_mount_point("/", static_dir->string()))
        throw std::runtime_error("static dir not found: " + static_dir->string());
}

}  // namespace persuade
