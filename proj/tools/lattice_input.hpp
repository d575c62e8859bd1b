#pragma once

// Command-line lattice and complex-number notation.

#include "arcoh/lattice.hpp"
#include "arcoh/zeta.hpp"

#include <optional>
#include <string>

namespace arcoh::cli {

/// Resolves `standard:n`, `diag:a,b,...`, `random:n,degree,spread,seed` or a
/// JSON file {"field", "n", "basis", "label"}.  `field` is the explicitly
/// requested field, if any; a file's own field is used otherwise.
MetrizedLattice load_lattice(const std::string& source, const std::optional<FieldSpec>& field);

/// "2", "0.5+14.13i", "-3i", "1e-3-2.5i".
Complex parse_complex(const std::string& text);

}  // namespace arcoh::cli
