#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "gateway.hpp"
#include "hashing.hpp"
#include "prompts.hpp"

namespace persuade {

inline constexpr std::array<std::string_view, 5> kBigFiveOrder = {"Openness", "Conscientiousness", "Extraversion",
                                                                  "Agreeableness", "Neuroticism"};
inline constexpr std::array<std::string_view, 2> kDecisionStyleOrder = {"Rational", "Intuitive"};
inline constexpr std::string_view kBalanced = "Balanced";

struct PersonaAttributes {
    std::string age;
    std::string sex;
    std::string marital;
    std::string education;
    std::string income;
    std::string religion;
    std::string ideology;
    std::map<std::string, double> big_five;
    std::map<std::string, double> decision_style;

    friend bool operator==(const PersonaAttributes&, const PersonaAttributes&) = default;
};

struct Persona {
    std::string id;
    PersonaAttributes attributes;
    std::vector<std::string> trait_labels;
    std::vector<std::string> style_labels;
    std::string description;
    IntentionLevel initial_intention = IntentionLevel::initial(3);

    friend bool operator==(const Persona&, const Persona&) = default;
};

inline void to_json(json& j, const PersonaAttributes& a) {
    j = json{{"age", a.age},         {"sex", a.sex},           {"marital", a.marital},
             {"education", a.education}, {"income", a.income}, {"religion", a.religion},
             {"ideology", a.ideology}, {"big_five", a.big_five}, {"decision_style", a.decision_style}};
}
inline void from_json(const json& j, PersonaAttributes& a) {
    a.age = j.value("age", std::string{});
    a.sex = j.value("sex", std::string{});
    a.marital = j.value("marital", std::string{});
    a.education = j.value("education", std::string{});
    a.income = j.value("income", std::string{});
    a.religion = j.value("religion", std::string{});
    a.ideology = j.value("ideology", std::string{});
    a.big_five = j.value("big_five", std::map<std::string, double>{});
    a.decision_style = j.value("decision_style", std::map<std::string, double>{});
}
inline void to_json(json& j, const Persona& p) {
    j = json{{"id", p.id},
             {"attributes", p.attributes},
             {"trait_labels", p.trait_labels},
             {"style_labels", p.style_labels},
             {"description", p.description},
             {"initial_intention", p.initial_intention.value()}};
}
inline void from_json(const json& j, Persona& p) {
    p.id = j.at("id").get<std::string>();
    p.attributes = j.at("attributes").get<PersonaAttributes>();
    p.trait_labels = j.value("trait_labels", std::vector<std::string>{});
    p.style_labels = j.value("style_labels", std::vector<std::string>{});
    p.description = j.value("description", std::string{});
    p.initial_intention = IntentionLevel::initial(j.value("initial_intention", 3));
}

namespace detail {
inline std::size_t canonical_rank(const std::string& key) {
    for (std::size_t i = 0; i < kBigFiveOrder.size(); ++i)
        if (kBigFiveOrder[i] == key) return i;
    for (std::size_t i = 0; i < kDecisionStyleOrder.size(); ++i)
        if (kDecisionStyleOrder[i] == key) return i;
    return 100;
}
}  // namespace detail

/// Keys attaining the maximum (relative tolerance 1e-9), in canonical trait
/// order. When every key ties and there is more than one, returns {"Balanced"}.
inline std::vector<std::string> select_labels(const std::map<std::string, double>& values) {
    if (values.empty()) throw std::invalid_argument("select_labels: no values");
    double max = -std::numeric_limits<double>::infinity();
    for (const auto& [_, v] : values) max = std::max(max, v);
    const double tol = 1e-9 * std::abs(max);
    std::vector<std::string> winners;
    for (const auto& [k, v] : values)
        if (v >= max - tol) winners.push_back(k);
    if (winners.size() == values.size() && values.size() > 1) return {std::string(kBalanced)};
    std::stable_sort(winners.begin(), winners.end(), [](const std::string& a, const std::string& b) {
        auto ra = detail::canonical_rank(a), rb = detail::canonical_rank(b);
        return ra != rb ? ra < rb : a < b;
    });
    return winners;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline Bindings persona_desc_bindings(const PersonaAttributes& a, const std::vector<std::string>& trait_labels,
                                      const std::vector<std::string>& style_labels) {
    return Bindings{{"age", a.age},
                    {"sex", a.sex},
                    {"marital_status", a.marital},
                    {"educational_status", a.education},
                    {"income", a.income},
                    {"religion", a.religion},
                    {"ideology", a.ideology},
                    {"big_five_label", join(trait_labels, ", ")},
                    {"decision_making_style_label", join(style_labels, ", ")}};
}

/// The nine attribute lines used in place of a generated description.
inline std::string attribute_summary(const Persona& p) {
    const auto& a = p.attributes;
    std::ostringstream out;
    out << "Age: " << a.age << "\nSex: " << a.sex << "\nMarital: " << a.marital << "\nEducation: " << a.education
        << "\nIncome: " << a.income << "\nReligion: " << a.religion << "\nIdeology: " << a.ideology
        << "\nBig-Five Personality: " << join(p.trait_labels, ", ")
        << "\nDecision-Making Style: " << join(p.style_labels, ", ");
    return out.str();
}

struct DescriptionOptions {
    bool labels_only = false;
    std::string model = "gpt-4o-2024-11-20";
    std::optional<double> temperature;
    RetryPolicy retry;
};

/// Asks the backend for a persona description; returns the reply verbatim.
inline std::string generate_description(const Persona& persona, ChatBackend& backend, const DescriptionOptions& opts,
                                        TokenUsage* usage = nullptr, const Sleeper& sleep = real_sleeper()) {
    if (opts.labels_only) return {};
    auto req = ChatRequest::single_user(
        opts.model, render(TemplateId::persona_desc, Language::en,
                           persona_desc_bindings(persona.attributes, persona.trait_labels, persona.style_labels)));
    req.temperature = opts.temperature;
    req.tags = {{"role", "persona"}, {"persona", persona.id}};
    auto resp = complete(backend, req, opts.retry, sleep);
    if (usage) *usage += resp.usage;
    return resp.text;
}

/// Exact per-level counts by largest-remainder apportionment, then a seeded
/// shuffle. Remainder ties go to the lower level.
inline std::vector<IntentionLevel> assign_initial_intentions(std::size_t n, const std::array<double, 5>& weights,
                                                             std::uint64_t seed) {
    double total = 0;
    for (double w : weights) {
        if (w < 0 || !std::isfinite(w)) throw std::invalid_argument("intention weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0) throw std::invalid_argument("intention weights are all zero");
    std::array<std::size_t, 5> counts{};
    std::array<double, 5> frac{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        double quota = static_cast<double>(n) * weights[i] / total;
        // guard against 72.99999 from float division of exact ratios
        double fl = std::floor(quota + 1e-9);
        counts[i] = static_cast<std::size_t>(fl);
        frac[i] = quota - fl;
        assigned += counts[i];
    }
    std::array<std::size_t, 5> order{0, 1, 2, 3, 4};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b] + 1e-12; });
    for (std::size_t k = 0; assigned < n; k = (k + 1) % 5) {
        if (weights[order[k]] <= 0) continue;
        ++counts[order[k]];
        ++assigned;
    }
    std::vector<IntentionLevel> out;
    out.reserve(n);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t c = 0; c < counts[i]; ++c) out.push_back(IntentionLevel::initial(static_cast<int>(i) + 1));
    Rng rng(seed, "initial-intention");
    rng.shuffle(out);
    return out;
}

inline std::array<int, 5> level_counts(const std::vector<IntentionLevel>& levels) {
    std::array<int, 5> c{};
    for (const auto& l : levels) ++c[static_cast<std::size_t>(l.value() - 1)];
    return c;
}

// ---------------------------------------------------------------------------
// CSV ingestion

class PersonaCsvError : public std::runtime_error {
public:
    PersonaCsvError(std::size_t line, const std::string& msg)
        : std::runtime_error("personas line " + std::to_string(line) + ": " + msg), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// RFC 4180 records (quoted fields, doubled quotes, CRLF). Returns rows with
/// the starting line number of each record.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> parse_csv(std::string_view text) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, field_started = false;
    std::size_t line = 1, row_line = 1;
    auto end_row = [&] {
        row.push_back(std::move(field));
        field.clear();
        if (!(row.size() == 1 && row[0].empty())) rows.emplace_back(row_line, std::move(row));
        row.clear();
        field_started = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = field_started = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\r') {
            // tolerated before \n
        } else if (c == '\n') {
            end_row();
            row_line = ++line;
        } else {
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw PersonaCsvError(row_line, "unterminated quoted field");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline constexpr std::array<std::string_view, 14> kPersonaCsvColumns = {
    "age",      "sex",       "marital",      "education",   "income",        "religion", "ideology",
    "openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism", "rational", "intuitive"};

/// Reads personas from CSV text. Optional columns: id, initial_intention, description.
/// Labels are derived from the numeric columns.
inline std::vector<Persona> read_personas_csv(std::string_view text) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw PersonaCsvError(1, "missing header row");
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < rows[0].second.size(); ++i) {
        std::string name = rows[0].second[i];
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
        while (!name.empty() && name.back() == ' ') name.pop_back();
        while (!name.empty() && name.front() == ' ') name.erase(name.begin());
        col[name] = i;
    }
    for (auto c : kPersonaCsvColumns)
        if (!col.count(std::string(c))) throw PersonaCsvError(rows[0].first, "missing column " + std::string(c));

    std::vector<Persona> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [line, cells] = rows[r];
        auto cell = [&](std::string_view name) -> std::string {
            auto it = col.find(std::string(name));
            if (it == col.end() || it->second >= cells.size()) return {};
            return cells[it->second];
        };
        auto number = [&](std::string_view name) {
            std::string s = cell(name);
            try {
                std::size_t used = 0;
                double v = std::stod(s, &used);
                if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
                return v;
            } catch (const std::exception&) {
                throw PersonaCsvError(line, "column " + std::string(name) + " is not a number: '" + s + "'");
            }
        };
        if (cells.size() != rows[0].second.size())
            throw PersonaCsvError(line, "expected " + std::to_string(rows[0].second.size()) + " fields, got " +
                                            std::to_string(cells.size()));
        Persona p;
        auto& a = p.attributes;
        a.age = cell("age");
        a.sex = cell("sex");
        a.marital = cell("marital");
        a.education = cell("education");
        a.income = cell("income");
        a.religion = cell("religion");
        a.ideology = cell("ideology");
        double big_sum = 0, style_sum = 0;
        for (auto trait : kBigFiveOrder) {
            std::string key(trait);
            std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
            double v = number(key);
            a.big_five[std::string(trait)] = v;
            big_sum += v;
        }
        for (auto style : kDecisionStyleOrder) {
            std::string key(style);
            std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
            double v = number(key);
            a.decision_style[std::string(style)] = v;
            style_sum += v;
        }
        if (std::abs(big_sum - 1.0) > 1e-6)
            throw PersonaCsvError(line, "Big-Five values sum to " + std::to_string(big_sum) + ", expected 1.0");
        if (std::abs(style_sum - 1.0) > 1e-6)
            throw PersonaCsvError(line, "decision-style values sum to " + std::to_string(style_sum) + ", expected 1.0");
        p.trait_labels = select_labels(a.big_five);
        p.style_labels = select_labels(a.decision_style);
        std::string id = cell("id");
        if (id.empty()) {
            std::ostringstream s;
            s << "p" << std::setw(4) << std::setfill('0') << out.size() + 1;
            id = s.str();
        }
        p.id = id;
        p.description = cell("description");
        if (std::string lvl = cell("initial_intention"); !lvl.empty()) {
            try {
                p.initial_intention = IntentionLevel::initial(std::stoi(lvl));
            } catch (const std::exception&) {
                throw PersonaCsvError(line, "initial_intention must be 1..5, got '" + lvl + "'");
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

inline std::vector<Persona> read_personas_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("personas: not found");
    std::ostringstream ss;
    ss << in.rdbuf();
    return read_personas_csv(ss.str());
}

namespace detail {
inline std::string fmt_share(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}
}  // namespace detail

inline std::string write_personas_csv(const std::vector<Persona>& personas, bool with_intention = true) {
    std::ostringstream out;
    out << "id";
    for (auto c : kPersonaCsvColumns) out << ',' << c;
    if (with_intention) out << ",initial_intention";
    out << ",description\n";
    for (const auto& p : personas) {
        const auto& a = p.attributes;
        out << csv_escape(p.id) << ',' << csv_escape(a.age) << ',' << csv_escape(a.sex) << ',' << csv_escape(a.marital)
            << ',' << csv_escape(a.education) << ',' << csv_escape(a.income) << ',' << csv_escape(a.religion) << ','
            << csv_escape(a.ideology);
        for (auto t : kBigFiveOrder) out << ',' << detail::fmt_share(a.big_five.at(std::string(t)));
        for (auto s : kDecisionStyleOrder) out << ',' << detail::fmt_share(a.decision_style.at(std::string(s)));
        if (with_intention) out << ',' << p.initial_intention.value();
        out << ',' << csv_escape(p.description) << '\n';
    }
    return out.str();
}

/// Seeded synthetic personas shaped like P4G survey rows. Trait shares are
/// multiples of 1/20 so ties and "Balanced" rows occur naturally.
inline std::vector<Persona> synthesize_personas(std::size_t n, std::uint64_t seed) {
    static const std::vector<std::string> kSex = {"Female", "Male", "Other"};
    static const std::vector<std::string> kMarital = {"Single", "Married", "Divorced", "Widowed"};
    static const std::vector<std::string> kEducation = {"High school", "Some college", "Associate degree",
                                                        "Bachelor's degree", "Master's degree", "Doctorate"};
    static const std::vector<std::string> kIncome = {"Less than $10,000", "$10,000 to $24,999", "$25,000 to $49,999",
                                                     "$50,000 to $74,999", "$75,000 to $99,999", "$100,000 or more"};
    static const std::vector<std::string> kReligion = {"Atheist", "Agnostic", "Catholic", "Protestant",
                                                       "Other Christian", "Jewish", "Muslim", "Buddhist", "Hindu"};
    static const std::vector<std::string> kIdeology = {"Liberal", "Moderate", "Conservative"};
    Rng rng(seed, "synthetic-personas");
    auto pick = [&](const std::vector<std::string>& v) { return v[rng.uniform_index(v.size())]; };
    std::vector<Persona> out;
    for (std::size_t i = 0; i < n; ++i) {
        Persona p;
        auto& a = p.attributes;
        a.age = std::to_string(rng.uniform_int(18, 75));
        a.sex = pick(kSex);
        a.marital = pick(kMarital);
        a.education = pick(kEducation);
        a.income = pick(kIncome);
        a.religion = pick(kReligion);
        a.ideology = pick(kIdeology);
        // one in twelve rows is evenly balanced
        std::array<int, 5> parts{4, 4, 4, 4, 4};
        if (rng.uniform_index(12) != 0) {
            std::array<int, 4> cuts{};
            for (auto& c : cuts) c = rng.uniform_int(0, 20);
            std::sort(cuts.begin(), cuts.end());
            parts = {cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], cuts[3] - cuts[2], 20 - cuts[3]};
        }
        for (std::size_t t = 0; t < 5; ++t) a.big_five[std::string(kBigFiveOrder[t])] = parts[t] / 20.0;
        int r = rng.uniform_int(0, 20);
        a.decision_style["Rational"] = r / 20.0;
        a.decision_style["Intuitive"] = (20 - r) / 20.0;
        p.trait_labels = select_labels(a.big_five);
        p.style_labels = select_labels(a.decision_style);
        std::ostringstream id;
        id << "p" << std::setw(4) << std::setfill('0') << i + 1;
        p.id = id.str();
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace persuade
