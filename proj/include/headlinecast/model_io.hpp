#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "headlinecast/corpus.hpp"
#include "headlinecast/forest.hpp"
#include "headlinecast/rae.hpp"

namespace hcast::model_io {

/// A trained forest plus everything needed to score raw token lists: the
/// training vocabulary (terms, document frequencies) and the weighting its
/// feature rows were built with.
struct ForestBundle {
    forest::ForestModel model;
    std::vector<std::string> class_names;
    corpus::Vocabulary vocab;
    corpus::Weighting weighting = corpus::Weighting::tfidf;
};

/// JSON codecs. Serialization is canonical: keys are emitted sorted and
/// floating-point values use shortest-round-trip decimals, so an identical
/// model always produces identical bytes and reloads bit-exactly.
nlohmann::json forest_to_json(const ForestBundle& bundle);
ForestBundle forest_from_json(const nlohmann::json& j);
nlohmann::json rae_to_json(const rae::RaeModel& model);
rae::RaeModel rae_from_json(const nlohmann::json& j);

void save_forest(const std::filesystem::path& path, const ForestBundle& bundle);
ForestBundle load_forest(const std::filesystem::path& path);
void save_rae(const std::filesystem::path& path, const rae::RaeModel& model);
rae::RaeModel load_rae(const std::filesystem::path& path);

enum class ModelKind { forest, rae };

/// Reads just enough of a model file to tell which kind it holds.
ModelKind sniff_model(const std::filesystem::path& path);

/// Two-column CSV ("iteration,loss") with full-precision loss values.
void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& losses);

} // namespace hcast::model_io
