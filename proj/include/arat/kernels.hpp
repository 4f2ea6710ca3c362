#pragma once

#include <string>
#include <vector>

namespace arat {

struct KernelSpec {
    std::string name;
    std::string ir;     // program text, identical to the shipped .arat-ir file
    std::string config; // default analysis config text
    std::vector<std::string> targets;
    // alternate input sets by label; the default bindings live inline in the ir
    std::vector<std::pair<std::string, std::string>> inputs;
};

const std::vector<KernelSpec>& kernel_registry();
const KernelSpec& kernel(const std::string& name);
const std::string* kernel_inputs(const KernelSpec& k, const std::string& label);

} // namespace arat
