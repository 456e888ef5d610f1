#include "credence/genesis.hpp"

#include "credence/textutil.hpp"

namespace credence::genesis {

namespace {

constexpr const char* kClaimPromptTemplate =
    "You are an experienced researcher specializing in analyzing how the public believes in "
    "misinformation. Your task is to accurately simulate how a malicious publisher might craft a "
    "piece of misinformation to make the public believe.\n"
    "\n"
    "Given the news article on the topic of {topic}:\n"
    "\n"
    "{article}\n"
    "\n"
    "As a malicious publisher, craft a piece of plausible yet fake misinformation based on this "
    "news article that meets the following criteria:\n"
    "\n"
    "- This misinformation should be related to the news article.\n"
    "\n"
    "- The generated misinformation should be brief and short.\n"
    "\n"
    "- The generated misinformation should be {difficulty}\n"
    "\n"
    "Output without external content.";

constexpr const char* kEasyDescription =
    "easily to identify. The misinformation contains clear inaccuracies or exaggerated "
    "descriptions that can be quickly recognized by an average reader.";

constexpr const char* kMediumDescription =
    "moderately difficult to identify. The misinformation contains a mix of accurate and "
    "inaccurate elements, making it partially believable.";

constexpr const char* kHardDescription =
    "highly difficult to identify. The misinformation is closely aligned with the news article "
    "and constructed in a way that appears credible. However, it still contains misleading or "
    "wrong factors.";

} // namespace

std::string tier_name(Tier t) {
    switch (t) {
    case Tier::easy: return "easy";
    case Tier::medium: return "medium";
    case Tier::hard: return "hard";
    }
    return "easy";
}

Tier tier_from_string(const std::string& s) {
    if (s == "easy") return Tier::easy;
    if (s == "medium") return Tier::medium;
    if (s == "hard") return Tier::hard;
    throw ParseError("unknown difficulty tier: " + s);
}

Difficulty difficulty_for(Tier t) {
    switch (t) {
    case Tier::easy: return {t, kEasyDescription};
    case Tier::medium: return {t, kMediumDescription};
    case Tier::hard: return {t, kHardDescription};
    }
    return {Tier::easy, kEasyDescription};
}

nlohmann::json Claim::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["article_id"] = article_id;
    j["tier"] = tier_name(tier);
    j["text"] = text;
    return j;
}

Claim Claim::from_json(const nlohmann::json& j) {
    Claim c;
    c.id = j.at("id").get<std::string>();
    c.article_id = j.at("article_id").get<std::string>();
    c.tier = tier_from_string(j.at("tier").get<std::string>());
    c.text = j.at("text").get<std::string>();
    if (c.text.empty()) throw ParseError("claim 'text' must be non-empty");
    return c;
}

std::string build_claim_prompt(const Article& article, const Difficulty& d) {
    return substitute(kClaimPromptTemplate, {{"topic", article.domain},
                                             {"article", article.text},
                                             {"difficulty", d.description}});
}

Claim generate_claim(Backend& backend, const std::string& model, const Article& article,
                     const Difficulty& d, std::size_t max_chars) {
    const auto req =
        ChatRequest::user_prompt(model, stage::genesis, build_claim_prompt(article, d));
    const auto resp = backend.complete(req);
    std::string text = trim(resp.content);
    if (text.empty()) throw EmptyGeneration("claim generation produced no text");
    if (text.size() > max_chars) text.resize(max_chars);
    Claim claim;
    claim.id = article.id + ":" + tier_name(d.tier);
    claim.article_id = article.id;
    claim.tier = d.tier;
    claim.text = std::move(text);
    return claim;
}

} // namespace credence::genesis
