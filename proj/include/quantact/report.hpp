#pragma once

// Structured text reports: a title, key/value context lines and one entry
// per checked identity with its certificate.

#include "quantact/expr.hpp"

#include <string>
#include <vector>

namespace quantact {

struct CheckEntry {
    std::string name;
    bool passed = false;
    Certificate certificate = Certificate::Exact;
    std::string detail;  // residual printout or measured value
};

class Report {
public:
    explicit Report(std::string title) : title_(std::move(title)) {}

    void info(const std::string& key, const std::string& value) { info_.emplace_back(key, value); }
    CheckEntry& check(std::string name, bool passed, Certificate cert = Certificate::Exact, std::string detail = {});
    void merge(const Report& other, const std::string& prefix = {});

    bool passed() const;
    std::size_t failures() const;
    const std::string& title() const { return title_; }
    const std::vector<CheckEntry>& entries() const { return entries_; }
    const std::vector<std::pair<std::string, std::string>>& infos() const { return info_; }

    std::string str() const;

private:
    std::string title_;
    std::vector<std::pair<std::string, std::string>> info_;
    std::vector<CheckEntry> entries_;
};

}  // namespace quantact
