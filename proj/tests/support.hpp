// Shared fixtures for the unit tests.
#pragma once

#include <filesystem>
#include <string>

#include "pathbench/config.hpp"
#include "pathbench/graphgen.hpp"

#ifndef PATHBENCH_SOURCE_DIR
#error "PATHBENCH_SOURCE_DIR must point at the repository root"
#endif

namespace testing {

inline std::filesystem::path source_path(const std::string& rel) {
    return std::filesystem::path(PATHBENCH_SOURCE_DIR) / rel;
}

inline pathbench::GraphConfiguration bib_config() {
    return pathbench::load_graph_config(source_path("configs/bib.xml"));
}

inline pathbench::GraphConfiguration small_config() {
    return pathbench::load_graph_config(source_path("configs/small.xml"));
}

// The five-node graph drawn for the five-node configuration:
// v1..v3 are T1, v4 is T2, v5 is T3.
inline pathbench::GraphInstance small_graph() {
    pathbench::GraphInstance g;
    g.predicates = {"a", "b"};
    g.layout.ranges = {{"T1", 3, 1, 3}, {"T2", 1, 4, 4}, {"T3", 1, 5, 5}};
    const std::uint32_t a = 0;
    const std::uint32_t b = 1;
    g.edges = {{1, a, 2}, {2, a, 1}, {1, a, 3}, {2, a, 3}, {3, a, 5}, {2, a, 5}, {2, a, 2},
               {2, b, 4}, {4, b, 5}, {4, b, 4}};
    return g;
}

// Scratch directory removed on scope exit.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               (tag + "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

}  // namespace testing
