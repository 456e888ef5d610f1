#pragma once

#include <string>

#include <json.hpp>

#include "credence/backend.hpp"
#include "credence/corpus.hpp"

namespace credence::genesis {

enum class Tier { easy, medium, hard };

std::string tier_name(Tier t);
Tier tier_from_string(const std::string& s);

// A detection-difficulty tier plus the instruction text spliced into the
// claim-generation prompt for it.
struct Difficulty {
    Tier tier = Tier::easy;
    std::string description;
};

Difficulty difficulty_for(Tier t);

struct Claim {
    std::string id;
    std::string article_id;
    Tier tier = Tier::easy;
    std::string text;

    nlohmann::json to_json() const;
    static Claim from_json(const nlohmann::json& j);
};

// Claim-generation prompt for an article at a difficulty tier. Braces in the
// article text survive verbatim; only the template placeholders are filled.
std::string build_claim_prompt(const Article& article, const Difficulty& d);

inline constexpr std::size_t kDefaultClaimLengthCap = 2000;

// One backend call; the trimmed output becomes the claim text (truncated at
// max_chars). Whitespace-only output raises EmptyGeneration.
Claim generate_claim(Backend& backend, const std::string& model, const Article& article,
                     const Difficulty& d, std::size_t max_chars = kDefaultClaimLengthCap);

} // namespace credence::genesis
