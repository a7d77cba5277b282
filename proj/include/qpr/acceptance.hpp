#pragma once

#include <cstddef>
#include <ostream>
#include <string>

namespace qpr {

/** Runs the full acceptance suite against the fixture directory, printing one
 *  [PASS]/[FAIL] line per criterion to `out`.  Returns the failure count. */
std::size_t run_acceptance(std::ostream& out, const std::string& fixture_dir,
                           unsigned seed);

} // namespace qpr
