#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bdgkit/prob_space.hpp"

namespace bdgkit {

struct NamedProcess {
    std::string name;
    Process process;
};

/// A filtered space together with named processes living on it.
struct SpaceDocument {
    FilteredSpace space;
    std::vector<NamedProcess> processes;
};

// Layout: {outcomes, probs, horizon, partitions: [[[atom...]...]...],
//          processes: [{name, dim, values: [time][atom][coord]}]}
nlohmann::json to_json(const FilteredSpace& space, const std::vector<NamedProcess>& processes = {});
nlohmann::json process_to_json(const std::string& name, const Process& process);
SpaceDocument space_from_json(const nlohmann::json& doc);

void write_json_file(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::string& path);

} // namespace bdgkit
