#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "analytics.hpp"
#include "core.hpp"
#include "hashing.hpp"
#include "pairwise.hpp"
#include "persona.hpp"
#include "storage.hpp"

namespace persuade {

enum class TaskKind { pairwise, realism };

NLOHMANN_JSON_SERIALIZE_ENUM(TaskKind, {{TaskKind::pairwise, "pairwise"}, {TaskKind::realism, "realism"}})

struct TaskDialogue {
    std::string record_id;
    std::string agent_id;
    std::vector<Utterance> transcript;
};

inline void to_json(json& j, const TaskDialogue& d) {
    j = json{{"record_id", d.record_id}, {"agent_id", d.agent_id}, {"transcript", d.transcript}};
}
inline void from_json(const json& j, TaskDialogue& d) {
    d.record_id = j.at("record_id").get<std::string>();
    d.agent_id = j.at("agent_id").get<std::string>();
    d.transcript = j.at("transcript").get<std::vector<Utterance>>();
}

/// Server-side task. For pairwise tasks `dialogues` is {left, right}; which
/// agent sits where is the blinding and never leaves the server.
struct AnnotationTask {
    std::string id;
    TaskKind kind = TaskKind::pairwise;
    std::string persona_id;
    std::vector<TaskDialogue> dialogues;
    std::vector<std::string> annotators;

    /// What the annotation UI receives: transcripts as speaker/text only.
    [[nodiscard]] json client_payload() const {
        json dlgs = json::array();
        static constexpr const char* kPos[] = {"left", "right"};
        for (std::size_t i = 0; i < dialogues.size(); ++i) {
            json turns = json::array();
            for (const auto& u : dialogues[i].transcript) turns.push_back({{"speaker", u.speaker}, {"text", u.text}});
            json d{{"turns", turns}};
            if (kind == TaskKind::pairwise) d["position"] = kPos[i];
            dlgs.push_back(std::move(d));
        }
        return json{{"id", id}, {"kind", kind}, {"dialogues", dlgs}};
    }
};

inline void to_json(json& j, const AnnotationTask& t) {
    j = json{{"id", t.id}, {"kind", t.kind}, {"persona_id", t.persona_id}, {"dialogues", t.dialogues},
             {"annotators", t.annotators}};
}
inline void from_json(const json& j, AnnotationTask& t) {
    t.id = j.at("id").get<std::string>();
    t.kind = j.at("kind").get<TaskKind>();
    t.persona_id = j.value("persona_id", std::string{});
    t.dialogues = j.at("dialogues").get<std::vector<TaskDialogue>>();
    t.annotators = j.at("annotators").get<std::vector<std::string>>();
}

struct AnnotationAnswer {
    std::string task_id;
    std::string annotator_id;
    std::optional<std::string> choice;  // "left" | "right"
    std::optional<int> rating;          // 1..5
    std::string comment;
    std::string timestamp;

    friend bool operator==(const AnnotationAnswer&, const AnnotationAnswer&) = default;
};

inline void to_json(json& j, const AnnotationAnswer& a) {
    j = json{{"task_id", a.task_id}, {"annotator_id", a.annotator_id}, {"timestamp", a.timestamp}};
    detail::put_optional(j, "choice", a.choice);
    detail::put_optional(j, "rating", a.rating);
    if (!a.comment.empty()) j["comment"] = a.comment;
}
inline void from_json(const json& j, AnnotationAnswer& a) {
    a.task_id = j.at("task_id").get<std::string>();
    a.annotator_id = j.at("annotator_id").get<std::string>();
    a.choice = detail::get_optional<std::string>(j, "choice");
    a.rating = detail::get_optional<int>(j, "rating");
    a.comment = j.value("comment", std::string{});
    a.timestamp = j.value("timestamp", std::string{});
}

class MisalignedRuns : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline std::vector<Utterance> transcript_of(const DialogueRecord& r) {
    std::vector<Utterance> out;
    for (const auto& t : r.turns) {
        Utterance p{Speaker::persuader, t.persuader.text, t.persuader.turn_index, std::nullopt, std::nullopt, std::nullopt};
        Utterance q{Speaker::persuadee, t.persuadee.text, t.persuadee.turn_index, std::nullopt, std::nullopt, std::nullopt};
        out.push_back(std::move(p));
        out.push_back(std::move(q));
    }
    return out;
}
inline std::string task_id(std::size_t i) {
    std::ostringstream s;
    s << "t" << std::setw(4) << std::setfill('0') << i + 1;
    return s.str();
}
}  // namespace detail

/// Pairwise tasks pair the two runs by persona id, with a seeded left/right
/// coin per task. Aborted dialogues are skipped on both sides.
inline std::vector<AnnotationTask> build_pairwise_tasks(const std::vector<DialogueRecord>& run_a,
                                                        const std::vector<DialogueRecord>& run_b,
                                                        const std::vector<std::string>& annotators, std::uint64_t seed) {
    std::map<std::string, const DialogueRecord*> b_by_persona;
    for (const auto& r : run_b) b_by_persona[r.persona_id] = &r;
    std::set<std::string> a_personas;
    for (const auto& r : run_a) a_personas.insert(r.persona_id);
    if (a_personas.size() != b_by_persona.size() ||
        !std::all_of(a_personas.begin(), a_personas.end(), [&](const auto& p) { return b_by_persona.count(p) > 0; }))
        throw MisalignedRuns("runs do not cover the same personas");
    Rng blind(seed, "blinding");
    std::vector<AnnotationTask> out;
    for (const auto& ra : run_a) {
        const auto& rb = *b_by_persona.at(ra.persona_id);
        if (ra.aborted || rb.aborted) continue;
        AnnotationTask t;
        t.id = detail::task_id(out.size());
        t.kind = TaskKind::pairwise;
        t.persona_id = ra.persona_id;
        TaskDialogue da{ra.id, ra.agent_config_id, detail::transcript_of(ra)};
        TaskDialogue db{rb.id, rb.agent_config_id, detail::transcript_of(rb)};
        if (blind.coin()) std::swap(da, db);
        t.dialogues = {std::move(da), std::move(db)};
        t.annotators = annotators;
        out.push_back(std::move(t));
    }
    return out;
}

inline std::vector<AnnotationTask> build_realism_tasks(const std::vector<DialogueRecord>& run,
                                                       const std::vector<std::string>& annotators) {
    std::vector<AnnotationTask> out;
    for (const auto& r : run) {
        if (r.aborted) continue;
        AnnotationTask t;
        t.id = detail::task_id(out.size());
        t.kind = TaskKind::realism;
        t.persona_id = r.persona_id;
        t.dialogues = {TaskDialogue{r.id, r.agent_config_id, detail::transcript_of(r)}};
        t.annotators = annotators;
        out.push_back(std::move(t));
    }
    return out;
}

struct PairwiseSummary {
    std::string agent_a;
    std::string agent_b;
    int tasks = 0;
    int a_wins = 0;
    int ties = 0;
    int b_wins = 0;
    double win_pct = 0;
    double tie_pct = 0;
    double lose_pct = 0;
    std::optional<double> kappa;
    int kappa_items = 0;
};

struct AnnotationSummary {
    std::optional<PairwiseSummary> pairwise;
    std::optional<double> realism_mean;
    int realism_ratings = 0;
    std::map<std::string, double> realism_by_agent;
};

inline void to_json(json& j, const AnnotationSummary& s) {
    j = json::object();
    if (s.pairwise) {
        const auto& p = *s.pairwise;
        j["pairwise"] = {{"agent_a", p.agent_a}, {"agent_b", p.agent_b}, {"tasks", p.tasks},
                         {"a_wins", p.a_wins},   {"ties", p.ties},       {"b_wins", p.b_wins},
                         {"win_pct", p.win_pct}, {"tie_pct", p.tie_pct}, {"lose_pct", p.lose_pct},
                         {"kappa", p.kappa ? json(*p.kappa) : json(nullptr)}, {"kappa_items", p.kappa_items}};
    }
    j["realism_mean"] = s.realism_mean ? json(*s.realism_mean) : json(nullptr);
    j["realism_ratings"] = s.realism_ratings;
    j["realism_by_agent"] = s.realism_by_agent;
}

/// De-blinds answers. A pairwise task is a win for an agent when every
/// answer on it picked that agent, otherwise a tie. Kappa compares the first
/// two annotators listed on the tasks, over tasks both answered.
/// `agent_a` fixes which agent counts as the "win" side; empty picks the
/// agent seen first.
inline AnnotationSummary summarize(const std::vector<AnnotationTask>& tasks, const std::vector<AnnotationAnswer>& answers,
                                   std::string agent_a = {}) {
    std::map<std::string, const AnnotationTask*> by_id;
    for (const auto& t : tasks) by_id[t.id] = &t;
    std::map<std::string, std::vector<const AnnotationAnswer*>> per_task;
    for (const auto& a : answers) per_task[a.task_id].push_back(&a);

    AnnotationSummary s;
    double rating_sum = 0;
    std::map<std::string, std::pair<double, int>> rating_by_agent;
    PairwiseSummary pw;
    bool any_pairwise = false;
    std::vector<std::pair<std::string, std::string>> kappa_pairs;

    for (const auto& t : tasks) {
        auto it = per_task.find(t.id);
        if (it == per_task.end()) continue;
        if (t.kind == TaskKind::realism) {
            for (const auto* a : it->second) {
                if (!a->rating) continue;
                rating_sum += *a->rating;
                ++s.realism_ratings;
                auto& [sum, n] = rating_by_agent[t.dialogues.at(0).agent_id];
                sum += *a->rating;
                ++n;
            }
            continue;
        }
        auto chosen_agent = [&](const AnnotationAnswer& a) -> std::string {
            return t.dialogues.at(a.choice == std::optional<std::string>("left") ? 0 : 1).agent_id;
        };
        if (agent_a.empty()) agent_a = t.dialogues[0].agent_id;
        if (!any_pairwise) {
            pw.agent_a = agent_a;
            pw.agent_b = t.dialogues[0].agent_id == agent_a ? t.dialogues[1].agent_id : t.dialogues[0].agent_id;
            any_pairwise = true;
        }
        std::set<std::string> picks;
        std::map<std::string, std::string> by_annotator;
        for (const auto* a : it->second) {
            if (!a->choice) continue;
            picks.insert(chosen_agent(*a));
            by_annotator[a->annotator_id] = chosen_agent(*a);
        }
        if (picks.empty()) continue;
        ++pw.tasks;
        if (picks.size() == 1) {
            if (*picks.begin() == pw.agent_a) ++pw.a_wins;
            else ++pw.b_wins;
        } else {
            ++pw.ties;
        }
        if (t.annotators.size() >= 2) {
            auto r1 = by_annotator.find(t.annotators[0]);
            auto r2 = by_annotator.find(t.annotators[1]);
            if (r1 != by_annotator.end() && r2 != by_annotator.end()) kappa_pairs.emplace_back(r1->second, r2->second);
        }
    }
    if (any_pairwise) {
        pw.win_pct = percent_1dp(pw.a_wins, pw.tasks);
        pw.tie_pct = percent_1dp(pw.ties, pw.tasks);
        pw.lose_pct = percent_1dp(pw.b_wins, pw.tasks);
        pw.kappa_items = static_cast<int>(kappa_pairs.size());
        if (kappa_pairs.size() >= 2) pw.kappa = cohens_kappa_detail(kappa_pairs).kappa;
        s.pairwise = pw;
    }
    if (s.realism_ratings > 0) s.realism_mean = rating_sum / s.realism_ratings;
    for (const auto& [agent, sn] : rating_by_agent) s.realism_by_agent[agent] = sn.first / sn.second;
    return s;
}

// ---------------------------------------------------------------------------
// Service

struct HttpResult {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";

    static HttpResult json_body(int status, const json& j) { return {status, j.dump(), "application/json"}; }
    static HttpResult error(int status, const std::string& msg) { return json_body(status, json{{"error", msg}}); }
};

/// Task store plus append-only answer log. Handlers are plain functions of
/// their inputs so they can be tested without a socket.
class AnnotationService {
public:
    AnnotationService(std::vector<AnnotationTask> tasks, std::optional<std::filesystem::path> answers_path = {})
        : tasks_(std::move(tasks)), answers_path_(std::move(answers_path)) {
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            index_[tasks_[i].id] = i;
            for (const auto& a : tasks_[i].annotators) annotators_.insert(a);
        }
        if (answers_path_ && std::filesystem::exists(*answers_path_)) {
            for (const auto& e : read_jsonl(*answers_path_))
                if (e.kind == RecordKind::answer) accept(e.payload.get<AnnotationAnswer>());
        }
        if (answers_path_) writer_ = std::make_unique<JsonlWriter>(*answers_path_, true);
    }

    [[nodiscard]] const std::vector<AnnotationTask>& tasks() const { return tasks_; }

    [[nodiscard]] std::vector<AnnotationAnswer> answers() const {
        std::shared_lock lock(mu_);
        return answers_;
    }

    HttpResult next_task(const std::string& annotator) const {
        if (annotator.empty()) return HttpResult::error(400, "annotator query parameter required");
        if (!annotators_.count(annotator)) return HttpResult::error(404, "unknown annotator");
        std::shared_lock lock(mu_);
        int done = 0, total = 0;
        const AnnotationTask* next = nullptr;
        for (const auto& t : tasks_) {
            if (std::find(t.annotators.begin(), t.annotators.end(), annotator) == t.annotators.end()) continue;
            ++total;
            if (answered_.count({t.id, annotator})) ++done;
            else if (!next) next = &t;
        }
        if (!next) return {204, "", "application/json"};
        json body = next->client_payload();
        body["progress"] = {{"done", done}, {"total", total}};
        return HttpResult::json_body(200, body);
    }

    HttpResult post_answer(const std::string& body) {
        json j = json::parse(body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) return HttpResult::error(400, "body must be a JSON object");
        AnnotationAnswer a;
        try {
            a.task_id = j.at("task_id").get<std::string>();
            a.annotator_id = j.at("annotator_id").get<std::string>();
        } catch (const json::exception&) {
            return HttpResult::error(422, "task_id and annotator_id are required strings");
        }
        if (!annotators_.count(a.annotator_id)) return HttpResult::error(404, "unknown annotator");
        auto it = index_.find(a.task_id);
        if (it == index_.end()) return HttpResult::error(404, "unknown task");
        const auto& task = tasks_[it->second];
        if (std::find(task.annotators.begin(), task.annotators.end(), a.annotator_id) == task.annotators.end())
            return HttpResult::error(404, "task not assigned to this annotator");
        const bool has_choice = j.contains("choice") && !j["choice"].is_null();
        const bool has_rating = j.contains("rating") && !j["rating"].is_null();
        if (task.kind == TaskKind::pairwise) {
            if (has_rating) return HttpResult::error(422, "pairwise tasks take a choice, not a rating");
            if (!has_choice || !j["choice"].is_string()) return HttpResult::error(422, "choice must be \"left\" or \"right\"");
            auto c = j["choice"].get<std::string>();
            if (c != "left" && c != "right") return HttpResult::error(422, "choice must be \"left\" or \"right\"");
            a.choice = c;
        } else {
            if (has_choice) return HttpResult::error(422, "realism tasks take a rating, not a choice");
            if (!has_rating || !j["rating"].is_number_integer()) return HttpResult::error(422, "rating must be an integer 1..5");
            int r = j["rating"].get<int>();
            if (r < 1 || r > 5) return HttpResult::error(422, "rating must be an integer 1..5");
            a.rating = r;
        }
        if (j.contains("comment")) {
            if (!j["comment"].is_string()) return HttpResult::error(422, "comment must be a string");
            a.comment = j["comment"].get<std::string>();
        }
        a.timestamp = timestamp_utc();
        {
            std::unique_lock lock(mu_);
            if (answered_.count({a.task_id, a.annotator_id})) return HttpResult::error(409, "task already answered");
            if (writer_) writer_->write(RecordKind::answer, json(a));
            answered_.insert({a.task_id, a.annotator_id});
            answers_.push_back(a);
        }
        return HttpResult::json_body(201, json{{"ok", true}});
    }

    HttpResult progress() const {
        std::shared_lock lock(mu_);
        json per = json::object();
        int total = 0;
        for (const auto& t : tasks_) {
            for (const auto& a : t.annotators) {
                auto& slot = per[a];
                if (slot.is_null()) slot = {{"done", 0}, {"total", 0}};
                slot["total"] = slot["total"].get<int>() + 1;
                if (answered_.count({t.id, a})) slot["done"] = slot["done"].get<int>() + 1;
                ++total;
            }
        }
        return HttpResult::json_body(200, json{{"tasks", tasks_.size()},
                                               {"assignments", total},
                                               {"answered", answers_.size()},
                                               {"annotators", per}});
    }

    /// One CSV row per answer with the chosen side resolved to its agent.
    [[nodiscard]] std::string export_csv() const {
        std::shared_lock lock(mu_);
        std::ostringstream out;
        out << "task_id,kind,annotator_id,choice,chosen_agent,chosen_record,rating,left_agent,right_agent,comment,timestamp\n";
        for (const auto& a : answers_) {
            const auto& t = tasks_[index_.at(a.task_id)];
            std::string chosen_agent, chosen_record, left, right;
            if (t.kind == TaskKind::pairwise) {
                left = t.dialogues[0].agent_id;
                right = t.dialogues[1].agent_id;
                const auto& d = t.dialogues[*a.choice == "left" ? 0 : 1];
                chosen_agent = d.agent_id;
                chosen_record = d.record_id;
            } else {
                left = t.dialogues[0].agent_id;
            }
            out << csv_escape(a.task_id) << ',' << (t.kind == TaskKind::pairwise ? "pairwise" : "realism") << ','
                << csv_escape(a.annotator_id) << ',' << a.choice.value_or("") << ',' << csv_escape(chosen_agent) << ','
                << csv_escape(chosen_record) << ',' << (a.rating ? std::to_string(*a.rating) : "") << ','
                << csv_escape(left) << ',' << csv_escape(right) << ',' << csv_escape(a.comment) << ','
                << a.timestamp << '\n';
        }
        return out.str();
    }

    HttpResult export_result() const { return {200, export_csv(), "text/csv"}; }

    HttpResult summary_result(const std::string& agent_a = {}) const {
        return HttpResult::json_body(200, json(summarize(tasks_, answers(), agent_a)));
    }

private:
    void accept(const AnnotationAnswer& a) {
        if (!index_.count(a.task_id)) throw StorageError("answer log refers to unknown task " + a.task_id);
        if (answered_.insert({a.task_id, a.annotator_id}).second) answers_.push_back(a);
    }

    std::vector<AnnotationTask> tasks_;
    std::map<std::string, std::size_t> index_;
    std::set<std::string> annotators_;
    std::optional<std::filesystem::path> answers_path_;
    std::unique_ptr<JsonlWriter> writer_;
    mutable std::shared_mutex mu_;
    std::set<std::pair<std::string, std::string>> answered_;
    std::vector<AnnotationAnswer> answers_;
};

}  // namespace persuade
