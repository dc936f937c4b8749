#ifndef TOPK_CLI_HPP
#define TOPK_CLI_HPP

#include <cstdint>
#include <string_view>
#include <vector>

namespace topk {

// Exit codes: 0 success, 2 configuration or usage error, 1 runtime failure.
int run_cli(int argc, char** argv);

// "--seeds" value: a single integer n means seeds 1..n, a comma list (a
// trailing comma allowed, e.g. "42,") names the seeds. Throws ConfigError.
std::vector<std::uint64_t> parse_seeds(std::string_view text);

}  // namespace topk

#endif  // TOPK_CLI_HPP
