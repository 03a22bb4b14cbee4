#include "quantact/report.hpp"

#include <algorithm>
#include <sstream>

namespace quantact {

CheckEntry& Report::check(std::string name, bool passed, Certificate cert, std::string detail) {
    entries_.push_back({std::move(name), passed, cert, std::move(detail)});
    return entries_.back();
}

void Report::merge(const Report& other, const std::string& prefix) {
    for (const auto& [k, v] : other.info_) {
        info_.emplace_back(prefix + k, v);
    }
    for (const auto& e : other.entries_) {
        entries_.push_back(e);
        entries_.back().name = prefix + e.name;
    }
}

bool Report::passed() const { return failures() == 0; }

std::size_t Report::failures() const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const CheckEntry& e) { return !e.passed; }));
}

std::string Report::str() const {
    std::ostringstream out;
    out << "report: " << title_ << "\n";
    for (const auto& [k, v] : info_) {
        out << "  " << k << ": " << v << "\n";
    }
    for (const auto& e : entries_) {
        out << (e.passed ? "  PASS " : "  FAIL ") << e.name << " [" << to_string(e.certificate) << "]";
        if (!e.detail.empty()) {
            out << " " << e.detail;
        }
        out << "\n";
    }
    out << "summary: " << (entries_.size() - failures()) << "/" << entries_.size() << " passed\n";
    return out.str();
}

}  // namespace quantact
