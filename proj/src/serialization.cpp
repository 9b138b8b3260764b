#include "bdgkit/serialization.hpp"

#include <fstream>

#include "bdgkit/errors.hpp"

namespace bdgkit {

using nlohmann::json;

json process_to_json(const std::string& name, const Process& process) {
    json values = json::array();
    for (std::size_t n = 0; n < process.steps(); ++n) {
        json slice = json::array();
        for (std::size_t a = 0; a < process.atoms(); ++a) {
            const auto v = process.at(n, a);
            slice.push_back(json(std::vector<double>(v.begin(), v.end())));
        }
        values.push_back(std::move(slice));
    }
    return json{{"name", name}, {"dim", process.dim()}, {"values", std::move(values)}};
}

json to_json(const FilteredSpace& space, const std::vector<NamedProcess>& processes) {
    json partitions = json::array();
    for (int n = 0; n <= space.horizon(); ++n) {
        partitions.push_back(space.partition(n).blocks);
    }
    json procs = json::array();
    for (const auto& p : processes) {
        check_shape(space, p.process);
        procs.push_back(process_to_json(p.name, p.process));
    }
    return json{{"outcomes", space.outcomes()},
                {"probs", std::vector<double>(space.probs().begin(), space.probs().end())},
                {"horizon", space.horizon()},
                {"partitions", std::move(partitions)},
                {"processes", std::move(procs)}};
}

SpaceDocument space_from_json(const json& doc) {
    try {
        auto probs = doc.at("probs").get<std::vector<double>>();
        const int horizon = doc.at("horizon").get<int>();
        std::vector<Partition> partitions;
        for (const auto& blocks : doc.at("partitions")) {
            partitions.push_back(Partition{blocks.get<std::vector<Block>>()});
        }
        std::vector<std::string> outcomes;
        if (doc.contains("outcomes")) {
            outcomes = doc.at("outcomes").get<std::vector<std::string>>();
        }
        for (double p : probs) {
            if (p <= 0.0) {
                // Processes index atoms positionally, so pruning would misalign them.
                if (doc.contains("processes") && !doc.at("processes").empty()) {
                    throw ValidationError("documents with processes must not contain zero-probability atoms");
                }
            }
        }
        const std::size_t raw_atoms = probs.size();
        FilteredSpace space(std::move(probs), horizon, std::move(partitions), std::move(outcomes));
        SpaceDocument out{std::move(space), {}};
        if (doc.contains("processes")) {
            for (const auto& p : doc.at("processes")) {
                const auto dim = p.at("dim").get<std::size_t>();
                const auto& values = p.at("values");
                if (values.size() != out.space.steps()) {
                    throw StructuralError("process '" + p.at("name").get<std::string>() +
                                          "' has the wrong number of time slices");
                }
                Process proc(out.space.steps(), raw_atoms, dim);
                for (std::size_t n = 0; n < values.size(); ++n) {
                    if (values[n].size() != raw_atoms) {
                        throw StructuralError("process slice has the wrong number of atoms");
                    }
                    for (std::size_t a = 0; a < raw_atoms; ++a) {
                        const auto v = values[n][a].get<std::vector<double>>();
                        if (v.size() != dim) {
                            throw StructuralError("process value has the wrong dimension");
                        }
                        auto dst = proc.at(n, a);
                        std::copy(v.begin(), v.end(), dst.begin());
                    }
                }
                if (is_measurable(out.space, proc, Measurability::adapted)) {
                    proc.set_kind(Measurability::adapted);
                }
                out.processes.push_back({p.at("name").get<std::string>(), std::move(proc)});
            }
        }
        return out;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed space document: ") + e.what());
    }
}

void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) {
        throw std::ios_base::failure("cannot open '" + path + "' for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw std::ios_base::failure("failed writing '" + path + "'");
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::ios_base::failure("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON in '") + path + "': " + e.what());
    }
}

} // namespace bdgkit
