#pragma once

#include "bdiplay/story.hpp"

#include <filesystem>
#include <map>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace testing {

inline std::string story_path(const std::string& name) { return std::string(BDIPLAY_STORY_DIR) + "/" + name; }
inline std::string fixture_path(const std::string& name) { return std::string(BDIPLAY_FIXTURE_DIR) + "/" + name; }

inline const bdiplay::story::StoryDefinition& anchorhead() {
    static const auto def = bdiplay::story::load_story_file(story_path("anchorhead-day2.json"));
    return def;
}

inline const bdiplay::story::StoryDefinition& fixture(const std::string& name) {
    static std::map<std::string, bdiplay::story::StoryDefinition> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, bdiplay::story::load_story_file(fixture_path(name + ".json"))).first;
    return it->second;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("bdiplay-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

// The plot points of the recorded reference trace the shipped story is built from.
inline const std::vector<std::string>& reference_plot_points() {
    static const std::vector<std::string> ids{
        "examine-album",        "get-card",           "get-safe-combo",
        "open-safe",            "get-crypt-key",      "get-silver-locket",
        "read-basement-clippings", "read-bedroom-pages", "find-williams-coffin",
        "see-skull",            "get-skull",          "start-talking-to-bum",
        "get-flask",            "give-bum-flask",     "ask-bum-about-photo",
        "get-library-book",     "no-more-flasks",     "find-magic-shop",
        "buy-magic-ball",       "get-amulet",         "ask-bum-about-william",
        "open-puzzle-box",      "show-bum-skull",     "give-bum-amulet",
        "reject-amulet-from-player", "discover-book-in-sewer"};
    return ids;
}

}  // namespace testing
