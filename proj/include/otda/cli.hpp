#pragma once

namespace otda::cli {

// Full command-line surface. Returns 0 on success, 1 on usage/input errors,
// 2 on numerical failures (a partial report is still written when possible).
int run(int argc, const char* const* argv);

} // namespace otda::cli
