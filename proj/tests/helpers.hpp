#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dri/instance.hpp"

// Shared fixture builders for the unit tests.
namespace fixture {

    inline dri::Vertex vertex(int id, double x, double y, double demand, double ready, double due,
                              double service) {
        return dri::Vertex{id, x, y, demand, ready, due, service};
    }

    // Finalized instance from explicit vertices; vertices[0] must be the depot.
    inline dri::Instance instance(std::vector<dri::Vertex> vertices, int fleet, double capacity,
                                  dri::DistanceConvention convention = dri::DistanceConvention::exact) {
        dri::Instance result;
        result.name = "fixture";
        result.vertices = std::move(vertices);
        result.fleet_size = fleet;
        result.capacity = capacity;
        result.finalize(convention);
        return result;
    }

    // Scratch directory under the system temp root, wiped on destruction.
    class TempDir {
    public:
        explicit TempDir(const std::string& tag) {
            root = std::filesystem::temp_directory_path() / ("dri_test_" + tag);
            std::filesystem::remove_all(root);
            std::filesystem::create_directories(root);
        }
        ~TempDir() {
            std::error_code ignored;
            std::filesystem::remove_all(root, ignored);
        }

        std::string path(const std::string& name) const { return (root / name).string(); }

        void write(const std::string& name, const std::string& content) const {
            std::ofstream out(path(name), std::ios::binary);
            out << content;
        }

    private:
        std::filesystem::path root;
    };

}  // namespace fixture
