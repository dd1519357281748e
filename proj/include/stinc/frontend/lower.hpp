#pragma once

#include <stinc/frontend/ast.hpp>
#include <stinc/ir.hpp>

#include <string>
#include <vector>

namespace stinc {

// Lowers one contract (bases flattened, modifiers and internal calls
// inlined) to three-address IR.
// Throws UnknownIdentifier, RecursionUnsupported, UnsupportedFeature.
ir::Program lower(const ast::SourceUnit &unit, const std::string &contract);

// Lowers the last deployable contract of the unit.
ir::Program lower(const ast::SourceUnit &unit);

// Every deployable contract (interfaces and libraries are skipped).
std::vector<ir::Program> lower_all(const ast::SourceUnit &unit);

} // namespace stinc
