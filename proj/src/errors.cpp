#include "eblp/errors.hpp"

#include <sstream>

namespace eblp {

namespace {

std::string degenerate_message(const std::vector<std::size_t>& coords, double floor) {
    std::ostringstream os;
    os << coords.size() << " coordinate(s) observed with mean weight below " << floor << ":";
    const std::size_t shown = std::min<std::size_t>(coords.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) os << ' ' << coords[i];
    if (shown < coords.size()) os << " ...";
    return os.str();
}

}  // namespace

DegenerateCoordinateError::DegenerateCoordinateError(std::vector<std::size_t> coords, double floor)
    : Error(degenerate_message(coords, floor)), coords_(std::move(coords)) {}

}  // namespace eblp
