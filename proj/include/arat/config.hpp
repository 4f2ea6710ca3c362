#pragma once

#include "arat/advf.hpp"

#include <string>

namespace arat {

struct ConfigError {
    int line = 0;
    std::string message;
};

// flat "key value" lines, '#' comments. keys: k, pattern, accept, deduce,
// verify_deduction, jobs, seed, step_limit, shadow <object> abs <lo> <hi>,
// shadow <object> rel <eps>, tolerate <name> <tau>.
AnalysisConfig parse_config(const std::string& text);
void apply_config_line(AnalysisConfig& cfg, const std::string& line, int lineno);
std::vector<std::string> config_echo(const AnalysisConfig& cfg, const std::string& object);

// input bindings: one object per line, "name v v v ...", zero-fill tail.
Bindings parse_inputs(const std::string& text, const Program& p);

} // namespace arat
