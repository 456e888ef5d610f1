#include "credence/forge.hpp"

#include <cctype>

#include "credence/textutil.hpp"

namespace credence::forge {

namespace {

constexpr const char* kPlannerTemplate =
    "Claim: {claim}\n"
    "\n"
    "To enhance readers' belief in this claim, please post {count} social media comments. You "
    "should not directly support this claim, but imply that this claim is correct.\n"
    "Output in Python list format without any external content.";

constexpr const char* kReviewerTemplate =
    "Evidence: {evidence}\n"
    "\n"
    "Please analyze this evidence from the perspective of its authenticity. Provide your "
    "analysis without adding any additional content.";

constexpr const char* kRefinerTemplate =
    "Claim: {claim}\n"
    "\n"
    "Evidence: {evidence}\n"
    "\n"
    "Judgment: {judgment}\n"
    "\n"
    "Based on this judgment, please modify this evidence to make it more credible. Make sure the "
    "evidence could implicitly support this claim. Make sure the refined version is brief. "
    "Output the refined evidence without external content.";

// The scale wording uses an en dash and typographic apostrophes.
constexpr const char* kQuantifyTemplate =
    "You are a scoring model. Your task is to quantify how strongly the provided text asserts "
    "the authenticity of the evidence.\n"
    "\n"
    "Scoring scale (1–5):\n"
    "\n"
    "1 = The text expresses very weak confidence that the evidence is authentic, or suggests it "
    "may be fabricated\n"
    "\n"
    "2 = The text expresses low confidence in the evidence’s authenticity\n"
    "\n"
    "3 = The text expresses moderate or uncertain confidence\n"
    "\n"
    "4 = The text expresses strong confidence that the evidence is authentic\n"
    "\n"
    "5 = The text expresses very strong or definitive confidence in the evidence’s "
    "authenticity\n"
    "\n"
    "Instructions:\n"
    "\n"
    "- Score the text based on how strongly it affirms the authenticity of the evidence.\n"
    "\n"
    "- Output only a single integer from 1 to 5.\n"
    "\n"
    "- Do not include any explanation, justification, or extra text.\n"
    "\n"
    "Text to score:\n"
    "{judgment}";

// Parses one quoted string starting at s[i] (s[i] is ' or "). Returns the
// unescaped content and advances i past the closing quote, or returns
// nullopt on malformed input.
std::optional<std::string> parse_quoted(const std::string& s, std::size_t& i) {
    const char quote = s[i];
    std::string out;
    ++i;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '\\' && i + 1 < s.size()) {
            const char next = s[i + 1];
            switch (next) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case '\\': out += '\\'; break;
            case '\'': out += '\''; break;
            case '"': out += '"'; break;
            default: out += next; break;
            }
            i += 2;
            continue;
        }
        if (c == quote) {
            ++i;
            return out;
        }
        out += c;
        ++i;
    }
    return std::nullopt;
}

// Strict Python/JSON-style list of quoted strings.
std::optional<std::vector<std::string>> parse_list_literal(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') return std::nullopt;
    std::vector<std::string> items;
    std::size_t i = 1;
    const std::size_t end = s.size() - 1;
    while (i < end) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            ++i;
            continue;
        }
        if (c == '"' || c == '\'') {
            auto item = parse_quoted(s, i);
            if (!item) return std::nullopt;
            items.push_back(std::move(*item));
            continue;
        }
        return std::nullopt;
    }
    if (items.empty()) return std::nullopt;
    return items;
}

// Lines whose trimmed form is a quoted string (an optional trailing comma is
// tolerated).
std::vector<std::string> parse_quoted_lines(const std::string& raw) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= raw.size()) {
        std::size_t nl = raw.find('\n', start);
        if (nl == std::string::npos) nl = raw.size();
        std::string line = trim(raw.substr(start, nl - start));
        if (!line.empty() && line.back() == ',') line = trim(line.substr(0, line.size() - 1));
        if (line.size() >= 2 && (line.front() == '"' || line.front() == '\'') &&
            line.back() == line.front()) {
            std::size_t i = 0;
            auto item = parse_quoted(line, i);
            if (item && i == line.size()) items.push_back(std::move(*item));
        }
        if (nl == raw.size()) break;
        start = nl + 1;
    }
    return items;
}

// Non-empty lines with list furniture (brackets, bullets, "k." numbering)
// stripped. Lines that carried a bullet or number marker are collected
// separately: when enough of them exist they win over surrounding prose.
struct PlainLines {
    std::vector<std::string> marked;
    std::vector<std::string> all;
};

PlainLines parse_plain_lines(const std::string& raw) {
    PlainLines out;
    std::size_t start = 0;
    while (start <= raw.size()) {
        std::size_t nl = raw.find('\n', start);
        if (nl == std::string::npos) nl = raw.size();
        std::string line = trim(raw.substr(start, nl - start));
        if (line == "[" || line == "]") line.clear();
        if (!line.empty()) {
            std::size_t i = 0;
            bool had_marker = false;
            if (line[i] == '-' || line[i] == '*') {
                ++i;
                had_marker = true;
            } else {
                std::size_t d = i;
                while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
                if (d > i && d < line.size() && (line[d] == '.' || line[d] == ')')) {
                    i = d + 1;
                    had_marker = true;
                }
            }
            line = trim(line.substr(i));
            if (!line.empty()) {
                if (had_marker) out.marked.push_back(line);
                out.all.push_back(std::move(line));
            }
        }
        if (nl == raw.size()) break;
        start = nl + 1;
    }
    return out;
}

// Code-fence marker lines dropped.
std::string strip_fences(const std::string& raw) {
    std::string out;
    std::size_t start = 0;
    while (start <= raw.size()) {
        std::size_t nl = raw.find('\n', start);
        if (nl == std::string::npos) nl = raw.size();
        const std::string line = raw.substr(start, nl - start);
        if (trim(line).rfind("```", 0) != 0) {
            out += line;
            out += '\n';
        }
        if (nl == raw.size()) break;
        start = nl + 1;
    }
    if (!out.empty()) out.pop_back();
    return out;
}

} // namespace

void ForgeConfig::validate() const {
    if (m < 1) throw PreconditionError("m must be positive");
    if (max_rounds < 1) throw PreconditionError("max_rounds must be positive");
    if (accept_threshold < 1 || accept_threshold > 5)
        throw PreconditionError("accept_threshold must be in 1..5");
}

nlohmann::json ForgeConfig::to_json() const {
    return {{"m", m},
            {"max_rounds", max_rounds},
            {"early_stop", early_stop},
            {"accept_threshold", accept_threshold}};
}

ForgeConfig ForgeConfig::from_json(const nlohmann::json& j) {
    ForgeConfig cfg;
    cfg.m = j.value("m", cfg.m);
    cfg.max_rounds = j.value("max_rounds", cfg.max_rounds);
    cfg.early_stop = j.value("early_stop", cfg.early_stop);
    cfg.accept_threshold = j.value("accept_threshold", cfg.accept_threshold);
    cfg.validate();
    return cfg;
}

nlohmann::json EvidenceTrace::to_json() const {
    nlohmann::json j;
    j["claim_id"] = claim_id;
    j["config"] = config.to_json();
    auto drafts_json = nlohmann::json::array();
    for (const auto& draft : drafts) {
        nlohmann::json d;
        d["draft_index"] = draft.draft_index;
        d["stop_round"] = draft.stop_round ? nlohmann::json(*draft.stop_round) : nlohmann::json();
        d["failure"] = draft.failure ? nlohmann::json(*draft.failure) : nlohmann::json();
        auto rounds_json = nlohmann::json::array();
        for (const auto& entry : draft.rounds) {
            nlohmann::json r;
            r["round"] = entry.evidence.round;
            r["evidence"] = entry.evidence.text;
            r["judgment"] = entry.judgment.text;
            r["score"] = entry.judgment.score ? nlohmann::json(*entry.judgment.score)
                                              : nlohmann::json();
            rounds_json.push_back(std::move(r));
        }
        d["rounds"] = std::move(rounds_json);
        drafts_json.push_back(std::move(d));
    }
    j["drafts"] = std::move(drafts_json);
    return j;
}

EvidenceTrace EvidenceTrace::from_json(const nlohmann::json& j) {
    EvidenceTrace trace;
    trace.claim_id = j.at("claim_id").get<std::string>();
    trace.config = ForgeConfig::from_json(j.at("config"));
    for (const auto& d : j.at("drafts")) {
        DraftTrace draft;
        draft.draft_index = d.at("draft_index").get<int>();
        if (d.contains("stop_round") && !d["stop_round"].is_null())
            draft.stop_round = d["stop_round"].get<int>();
        if (d.contains("failure") && !d["failure"].is_null())
            draft.failure = d["failure"].get<std::string>();
        for (const auto& r : d.at("rounds")) {
            RoundEntry entry;
            entry.evidence.claim_id = trace.claim_id;
            entry.evidence.draft_index = draft.draft_index;
            entry.evidence.round = r.at("round").get<int>();
            entry.evidence.text = r.at("evidence").get<std::string>();
            entry.judgment.claim_id = trace.claim_id;
            entry.judgment.draft_index = draft.draft_index;
            entry.judgment.round = entry.evidence.round;
            entry.judgment.text = r.at("judgment").get<std::string>();
            if (r.contains("score") && !r["score"].is_null())
                entry.judgment.score = r["score"].get<int>();
            draft.rounds.push_back(std::move(entry));
        }
        trace.drafts.push_back(std::move(draft));
    }
    return trace;
}

std::vector<std::string> EvidenceTrace::evidence_at_round(int round, int count) const {
    std::vector<std::string> out;
    for (const auto& draft : drafts) {
        if (draft.draft_index > count) continue;
        if (round >= static_cast<int>(draft.rounds.size()))
            throw PreconditionError("draft " + std::to_string(draft.draft_index) +
                                    " of claim " + claim_id + " has no round " +
                                    std::to_string(round));
        out.push_back(draft.rounds[static_cast<std::size_t>(round)].evidence.text);
    }
    if (static_cast<int>(out.size()) < count)
        throw PreconditionError("trace for claim " + claim_id + " has fewer than " +
                                std::to_string(count) + " drafts");
    return out;
}

std::vector<Evidence> EvidenceTrace::round_evidence(int round) const {
    std::vector<Evidence> out;
    for (const auto& draft : drafts)
        if (round < static_cast<int>(draft.rounds.size()))
            out.push_back(draft.rounds[static_cast<std::size_t>(round)].evidence);
    return out;
}

std::string build_planner_prompt(const Claim& claim, int m) {
    return substitute(kPlannerTemplate, {{"claim", claim.text}, {"count", number_word(m)}});
}

std::string build_reviewer_prompt(const Evidence& ev) {
    return substitute(kReviewerTemplate, {{"evidence", ev.text}});
}

std::string build_refiner_prompt(const Claim& claim, const Evidence& ev, const Judgment& j) {
    return substitute(kRefinerTemplate,
                      {{"claim", claim.text}, {"evidence", ev.text}, {"judgment", j.text}});
}

std::string build_quantify_prompt(const Judgment& j) {
    return substitute(kQuantifyTemplate, {{"judgment", j.text}});
}

std::vector<std::string> parse_planner_output(const std::string& raw, int m) {
    if (m < 1) throw PreconditionError("m must be positive");
    const std::string defenced = strip_fences(raw);
    std::vector<std::string> items;
    if (auto strict = parse_list_literal(defenced)) items = std::move(*strict);
    if (static_cast<int>(items.size()) < m) {
        auto quoted = parse_quoted_lines(defenced);
        if (quoted.size() > items.size()) items = std::move(quoted);
    }
    if (static_cast<int>(items.size()) < m) {
        auto plain = parse_plain_lines(defenced);
        auto& pool = static_cast<int>(plain.marked.size()) >= m ? plain.marked : plain.all;
        if (pool.size() > items.size()) items = std::move(pool);
    }
    if (static_cast<int>(items.size()) < m)
        throw PlannerParseError("recovered " + std::to_string(items.size()) +
                                " evidence drafts, need " + std::to_string(m));
    items.resize(static_cast<std::size_t>(m));
    return items;
}

int parse_single_score(const std::string& raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (c < '1' || c > '5') continue;
        const bool prev_digit = i > 0 && std::isdigit(static_cast<unsigned char>(raw[i - 1]));
        const bool next_digit =
            i + 1 < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i + 1]));
        if (!prev_digit && !next_digit) return c - '0';
    }
    throw ScoreParseError("no standalone score 1..5 in: " + raw.substr(0, 120));
}

std::vector<Evidence> plan_evidence(Backend& backend, const std::string& model,
                                    const Claim& claim, int m) {
    const auto req = ChatRequest::user_prompt(model, stage::planner, build_planner_prompt(claim, m));
    const auto resp = backend.complete(req);
    const auto texts = parse_planner_output(resp.content, m);
    std::vector<Evidence> drafts;
    drafts.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const std::string text = trim(texts[i]);
        if (text.empty()) throw PlannerParseError("planner draft " + std::to_string(i + 1) + " is empty");
        drafts.push_back({claim.id, static_cast<int>(i) + 1, 0, text});
    }
    return drafts;
}

Judgment review(Backend& backend, const std::string& model, const Evidence& ev) {
    if (ev.text.empty()) throw PreconditionError("evidence text must be non-empty");
    const auto req = ChatRequest::user_prompt(model, stage::reviewer, build_reviewer_prompt(ev));
    const auto resp = backend.complete(req);
    if (trim(resp.content).empty()) throw EmptyGeneration("reviewer produced no judgment");
    return {ev.claim_id, ev.draft_index, ev.round, resp.content, std::nullopt};
}

int quantify_judgment(Backend& backend, const std::string& model, const Judgment& j) {
    if (j.text.empty()) throw PreconditionError("judgment text must be non-empty");
    const auto req = ChatRequest::user_prompt(model, stage::quantify, build_quantify_prompt(j));
    const auto resp = backend.complete(req);
    return parse_single_score(resp.content);
}

Evidence refine(Backend& backend, const std::string& model, const Claim& claim,
                const Evidence& ev, const Judgment& j, int max_rounds) {
    if (j.claim_id != ev.claim_id || j.draft_index != ev.draft_index || j.round != ev.round)
        throw PreconditionError("judgment does not belong to this evidence");
    if (ev.round >= max_rounds)
        throw PreconditionError("evidence round " + std::to_string(ev.round) +
                                " already at max_rounds");
    const auto req =
        ChatRequest::user_prompt(model, stage::refiner, build_refiner_prompt(claim, ev, j));
    const auto resp = backend.complete(req);
    const std::string text = trim(resp.content);
    if (text.empty()) throw EmptyGeneration("refiner produced no text");
    return {ev.claim_id, ev.draft_index, ev.round + 1, text};
}

EvidenceTrace run_refinement(Backend& backend, const std::string& model, const Claim& claim,
                             const ForgeConfig& cfg) {
    cfg.validate();
    EvidenceTrace trace;
    trace.claim_id = claim.id;
    trace.config = cfg;

    std::vector<Evidence> drafts = plan_evidence(backend, model, claim, cfg.m);

    // Drafts run serially: the mock's per-stage response sequencing makes
    // replay determinism depend on a fixed consumption order.
    for (auto& draft0 : drafts) {
        DraftTrace draft;
        draft.draft_index = draft0.draft_index;
        try {
            Evidence current = draft0;
            for (int round = 0; round <= cfg.max_rounds; ++round) {
                Judgment judgment = review(backend, model, current);
                judgment.score = quantify_judgment(backend, model, judgment);
                draft.rounds.push_back({current, judgment});
                if (cfg.early_stop && *judgment.score >= cfg.accept_threshold) {
                    draft.stop_round = round;
                    break;
                }
                if (round == cfg.max_rounds) break;
                current = refine(backend, model, claim, current, judgment, cfg.max_rounds);
            }
        } catch (const Error& e) {
            draft.failure = e.what();
        }
        trace.drafts.push_back(std::move(draft));
    }
    return trace;
}

} // namespace credence::forge
