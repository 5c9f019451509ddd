#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace commitforge {

/// Minimal value-or-error holder used across module boundaries.
template <class T, class E>
class Expected {
  public:
    Expected(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    Expected(E error) : v_(std::in_place_index<1>, std::move(error)) {}

    bool ok() const { return v_.index() == 0; }
    explicit operator bool() const { return ok(); }

    T& value() {
        if (!ok()) throw std::logic_error("Expected: no value");
        return std::get<0>(v_);
    }
    const T& value() const {
        if (!ok()) throw std::logic_error("Expected: no value");
        return std::get<0>(v_);
    }
    E& error() {
        if (ok()) throw std::logic_error("Expected: no error");
        return std::get<1>(v_);
    }
    const E& error() const {
        if (ok()) throw std::logic_error("Expected: no error");
        return std::get<1>(v_);
    }

  private:
    std::variant<T, E> v_;
};

} // namespace commitforge
