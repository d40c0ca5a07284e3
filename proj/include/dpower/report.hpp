#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace dpower {

struct CheckRecord {
    std::string name;
    bool pass = true;
    double max_residual = 0.0;
    std::size_t samples = 0;
    std::string note;
};

struct Report {
    std::string suite;
    std::vector<CheckRecord> checks;

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
    }

    CheckRecord& add(std::string name, bool ok, double residual = 0.0, std::size_t samples = 1,
                     std::string note = {}) {
        checks.push_back({std::move(name), ok, residual, samples, std::move(note)});
        return checks.back();
    }

    const CheckRecord* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    void absorb(const Report& other, const std::string& prefix = {}) {
        for (auto c : other.checks) {
            if (!prefix.empty()) c.name = prefix + c.name;
            checks.push_back(std::move(c));
        }
    }
};

// Accumulates one named numeric check across many samples.
class Tally {
public:
    Tally(std::string name, double tolerance) : name_(std::move(name)), tol_(tolerance) {}

    void observe(double residual) {
        ++samples_;
        // NaN must fail, so compare in the accepting direction.
        if (!(residual <= tol_)) ok_ = false;
        if (residual > worst_ || residual != residual) worst_ = residual;
    }

    void fail(std::string why) {
        ++samples_;
        ok_ = false;
        if (note_.empty()) note_ = std::move(why);
    }

    void commit(Report& r) const { r.add(name_, ok_ && samples_ > 0, worst_, samples_, note_); }

private:
    std::string name_;
    double tol_;
    double worst_ = 0.0;
    std::size_t samples_ = 0;
    bool ok_ = true;
    std::string note_;
};

}  // namespace dpower
