#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "credence/backend.hpp"

namespace testsupport {

inline std::string test_dir() { return CREDENCE_TEST_DIR; }

inline std::string golden_path(const std::string& name) {
    return test_dir() + "/golden/" + name;
}

inline std::string data_path(const std::string& name) { return test_dir() + "/data/" + name; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(static_cast<bool>(in), ("cannot open " + path).c_str());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string golden(const std::string& name) { return read_file(golden_path(name)); }

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                ("credence_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

// Writes a script JSON to a temp file and builds a mock backend over it.
inline credence::BackendConfig scripted_config(const TempDir& dir, const nlohmann::json& script,
                                               std::uint64_t seed = 7) {
    const std::string path = dir.file("script.json");
    std::ofstream out(path);
    out << script.dump();
    out.close();
    credence::BackendConfig cfg;
    cfg.mode = credence::BackendMode::mock;
    cfg.mock_seed = seed;
    cfg.mock_script = path;
    return cfg;
}

// Shared prompt-fixture inputs; golden files were rendered from these.
namespace fixture {
inline constexpr const char* topic = "Sports";
inline constexpr const char* article =
    "The home team won the championship after a dramatic overtime finish on Saturday night.";
inline constexpr const char* claim =
    "The championship result was secretly overturned by league officials.";
inline constexpr const char* evidence =
    "A well-known commentator hinted the final score was under review.";
inline constexpr const char* evidence2 =
    "Several fans posted that the trophy ceremony felt staged.";
inline constexpr const char* judgment =
    "The evidence lacks a verifiable source and cannot be authenticated.";
inline constexpr const char* analysis =
    "This evidence implies insider knowledge without citing any source.";
inline constexpr const char* question = "Should I trust the announced championship result?";
inline constexpr const char* answer1 =
    "Wait for the official league statement before drawing conclusions.";
inline constexpr const char* answer2 = "Act now and dispute the result with the league.";
} // namespace fixture

} // namespace testsupport
