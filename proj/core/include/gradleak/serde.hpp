#pragma once

#include <string>

#include "gradleak/model.hpp"
#include "gradleak/tensor.hpp"

namespace gradleak {

// Architecture documents: {"input":{"channels":..,"height":..,"width":..},
// "layers":[{"type":..,...},...]}. Parsing runs full shape inference and
// structural validation; serialization emits the canonical form that
// arch_hash digests.
ArchitectureSpec parse_architecture(const std::string& text);
std::string serialize_architecture(const ArchitectureSpec& arch);

// Parameter and gradient files share one layout:
// {"arch_hash":"...","layers":[null | {"weights":{"shape":[...],"data":[...]},
// "bias":{...}|null}, ...]}. Gradient files additionally carry "seed" and
// "loss" metadata. Floats are written with the shortest representation that
// parses back to the identical 64-bit value, so round trips are exact.
std::string serialize_parameters(const ParameterSet& params);
ParameterSet parse_parameters(const std::string& text);
std::string serialize_gradients(const GradientBundle& grads);
GradientBundle parse_gradients(const std::string& text);

// Bare tensors: {"shape":[...],"data":[...]} with row-major flat data.
std::string serialize_tensor(const Tensor& t);
Tensor parse_tensor(const std::string& text);

// Whole-file convenience wrappers; read throws IoError when the file cannot
// be opened, write throws IoError when it cannot be created.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gradleak
