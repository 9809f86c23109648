#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace svx::cli {

inline constexpr const char* kConfigSchema = "svx-config/1";

/// Runs the svx command line. Exit codes: 0 success, 1 usage or parameter
/// error, 2 data, format or I/O error.
int run(int argc, const char* const* argv);
int run(std::vector<std::string> args);

/// Loads a config file and returns the flag tokens it implies for
/// `subcommand`. Only the section named after the subcommand is used.
/// `known` tells whether a long flag exists and whether it takes a value:
/// returns 0 unknown, 1 flag, 2 option with value.
std::vector<std::string> config_tokens(const std::filesystem::path& path, const std::string& subcommand,
                                       const std::function<int(const std::string&)>& known);

/// Parses "1,2,3" into channel indices.
std::vector<int> parse_int_list(const std::string& text, const char* what);

// overlay rendering --------------------------------------------------------

struct Rgb {
    std::uint8_t r, g, b;
};

class Canvas {
public:
    Canvas(int width, int height) : w_(width), h_(height), px_(static_cast<std::size_t>(width) * height * 3, 0) {}
    int width() const { return w_; }
    int height() const { return h_; }
    void set(int x, int y, Rgb c);
    void write_png(const std::filesystem::path& path) const;

private:
    int w_, h_;
    std::vector<std::uint8_t> px_;
};

}  // namespace svx::cli
