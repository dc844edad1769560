#pragma once

#include "c2fmc/pipeline.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>

namespace c2f {

// Flat key=value settings. Blank lines and text after '#' are ignored.
class KeyValues {
  public:
    static KeyValues parse(std::istream &in, const std::string &origin = "config");
    static KeyValues load(const std::filesystem::path &path);

    bool has(const std::string &key) const { return values_.count(key) != 0; }
    void set(const std::string &key, const std::string &value) { values_[key] = value; }
    const std::map<std::string, std::string> &entries() const { return values_; }

    std::string get_string(const std::string &key, const std::string &fallback) const;
    double get_double(const std::string &key, double fallback) const;
    long get_int(const std::string &key, long fallback) const;
    bool get_bool(const std::string &key, bool fallback) const;
    std::vector<double> get_doubles(const std::string &key, const std::vector<double> &fallback) const;

    // Throws if any key was never read by a getter.
    void require_all_used() const;
    std::string serialize() const;

  private:
    const std::string *lookup(const std::string &key) const;

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

// Seventeen significant digits, enough to read back the same double.
std::string format_double(double v);

// Reads every reconstruction setting, leaving defaults where a key is absent.
ReconConfig recon_config_from(const KeyValues &kv);
// Registration keys only, on top of the standalone registration defaults.
RegistrationConfig registration_config_from(const KeyValues &kv);
void write_recon_config(const ReconConfig &cfg, KeyValues &kv);

}  // namespace c2f
