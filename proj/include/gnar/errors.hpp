#pragma once

#include <stdexcept>
#include <string>

namespace gnar {

/// Too few usable observations for the requested model order.
class InsufficientData : public std::runtime_error {
public:
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gnar
