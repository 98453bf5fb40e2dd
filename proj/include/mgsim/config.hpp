#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mgsim/common.hpp"

namespace mgsim {

enum class KeyType { F64, I64, U64, Bool, Str };

struct SchemaEntry {
    const char* key;
    KeyType type;
    const char* def;  // canonical default, as written
    const char* doc;
};

/// Flat key = value configuration over a fixed schema. Values are stored in
/// canonical text form so that load -> save round-trips byte-identically.
/// Unknown keys and malformed values are rejected with the key name (and line
/// number when reading a file).
class Config {
  public:
    Config();  // all defaults

    static std::span<const SchemaEntry> schema();

    /// Throws ConfigError on unknown key or a value that does not parse as the
    /// declared type. Context (when nonempty) prefixes the error.
    void set(const std::string& key, const std::string& value, const std::string& context = "");

    /// "key=value" form used by command-line overrides.
    void set_kv(const std::string& kv);

    static Config load_file(const std::string& path);

    /// Canonical text: schema order, one "key = value" line each.
    std::string serialize() const;
    void save_file(const std::string& path) const;

    double get_f64(const std::string& key) const;
    std::int64_t get_i64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    const std::string& get_str(const std::string& key) const;

    bool is_default(const std::string& key) const;

    /// Canonical text for a double (shortest round-trip form).
    static std::string format_f64(double v);

  private:
    const SchemaEntry& entry(const std::string& key) const;
    std::map<std::string, std::string> values_;
};

/// Parse a comma-separated list of doubles ("1,2.5,3e-4").
std::vector<double> parse_double_list(const std::string& text, const std::string& what);

}  // namespace mgsim
