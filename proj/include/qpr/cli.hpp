#pragma once

namespace qpr {

/** Entry point behind main(); returns the process exit code. */
int run_cli(int argc, char** argv);

} // namespace qpr
