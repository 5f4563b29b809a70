#include "stratum/hooks.hpp"

namespace stratum {

std::string default_summarize(const std::vector<std::string>& texts) {
    std::string joined;
    for (const std::string& text : texts) {
        if (!joined.empty()) joined += "; ";
        joined += text;
    }
    if (joined.size() > 512) joined.resize(512);
    return joined;
}

} // namespace stratum
