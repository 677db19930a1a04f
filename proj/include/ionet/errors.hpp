#pragma once

#include <stdexcept>
#include <string>

namespace ionet {

// Error taxonomy drives CLI exit codes: config=2, data=3, numeric=4.
enum class errc { config = 2, data = 3, numeric = 4 };

class error : public std::runtime_error {
public:
    error(errc kind, std::string name, const std::string& msg)
        : std::runtime_error(name + ": " + msg), kind_(kind), name_(std::move(name)) {}

    errc kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

private:
    errc kind_;
    std::string name_;
};

inline error config_error(std::string name, const std::string& msg) {
    return error(errc::config, std::move(name), msg);
}
inline error data_error(std::string name, const std::string& msg) {
    return error(errc::data, std::move(name), msg);
}
inline error numeric_error(std::string name, const std::string& msg) {
    return error(errc::numeric, std::move(name), msg);
}

} // namespace ionet
