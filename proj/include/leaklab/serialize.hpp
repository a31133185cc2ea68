#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "leaklab/dataset.hpp"
#include "leaklab/model.hpp"
#include "leaklab/softlabels.hpp"

namespace leaklab {

using json = nlohmann::json;

std::string base64_encode(const void* data, std::size_t len);
std::vector<unsigned char> base64_decode(const std::string& s);

// matrices travel as base64 little-endian float64, row-major
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const json& j);

json partition_to_json(const Partition& p);
Partition partition_from_json(const json& j);

json model_to_json(const Model& m);
Model model_from_json(const json& j);

json softlabels_to_json(const SoftLabelSet& s);
SoftLabelSet softlabels_from_json(const json& j);

void save_json(const json& j, const std::string& path);
json load_json(const std::string& path);

}  // namespace leaklab
