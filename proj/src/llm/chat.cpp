#include "taskchain/llm/chat.hpp"

namespace taskchain {

double default_temperature(std::string_view r) {
    if (r == role::kVerifier || r == role::kReviser || r == role::kSummarizer) return 0.2;
    return 1.0;
}

}  // namespace taskchain
