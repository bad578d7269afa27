#include "idmc/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace idmc {

nlohmann::json spec_to_json(const LevySpec& spec) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : spec.atoms()) atoms.push_back({a.location, a.mass});
    return {{"sigma2", spec.sigma2()}, {"atoms", atoms}, {"label", spec.label()}};
}

LevySpec spec_from_json(const nlohmann::json& j) {
    std::vector<SpectralAtom> atoms;
    if (j.contains("atoms"))
        for (const auto& pair : j.at("atoms"))
            atoms.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    return LevySpec(j.value("sigma2", 0.0), std::move(atoms), j.value("label", "spec"));
}

nlohmann::json kernel_to_json(const IntensityKernel& kernel) {
    if (kernel.is_canonical()) return {{"type", "bacry-muzy"}};
    return {{"type", "general-r"}, {"name", kernel.name()}};
}

IntensityKernel kernel_from_json(const nlohmann::json& j) {
    const std::string type = j.value("type", "bacry-muzy");
    if (type == "bacry-muzy" || type == "canonical") return IntensityKernel::canonical();
    if (type == "general-r") {
        if (!j.contains("name"))
            throw std::invalid_argument("kernel_from_json: general-r needs a catalog name");
        return IntensityKernel::from_catalog(j.at("name").get<std::string>());
    }
    throw std::invalid_argument("kernel_from_json: unknown kernel.type '" + type + "'");
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    out += '\n';
    return out;
}

}  // namespace idmc
