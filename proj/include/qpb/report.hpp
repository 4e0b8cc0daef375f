#pragma once

#include <string>
#include <vector>

namespace qpb {

enum class Status { pass, fail, skipped };

const char* status_name(Status s);

struct Check {
    std::string name;
    Status status = Status::pass;
    std::string witness;
    double seconds = 0.0;
    int cases = 0;  ///< number of elements/pairs examined
};

struct Report {
    std::vector<Check> checks;

    bool ok() const;
    int failures() const;
    const Check* find(const std::string& name) const;
    bool passed(const std::string& name) const;

    /// Records a check; the witness is kept only for failures.
    Check& add(const std::string& name, bool ok, const std::string& witness = {}, int cases = 0);
    void skip(const std::string& name, const std::string& why);
    void merge(const Report& other, const std::string& prefix = {});
    std::string summary() const;
};

/// Accumulates one check over many cases and keeps the first failing witness.
class CheckAccumulator {
   public:
    explicit CheckAccumulator(std::string name) : name_(std::move(name)) {}
    void expect(bool ok, const std::string& witness) {
        ++cases_;
        if (!ok && first_.empty()) first_ = witness.empty() ? "(no witness)" : witness;
    }
    template <class F>
    void expect_lazy(bool ok, F&& witness) {
        ++cases_;
        if (!ok && first_.empty()) {
            first_ = witness();
            if (first_.empty()) first_ = "(no witness)";
        }
    }
    void fail(const std::string& witness) { expect(false, witness); }
    bool ok() const { return first_.empty(); }
    void commit(Report& r) const { r.add(name_, ok(), first_, cases_); }

   private:
    std::string name_;
    std::string first_;
    int cases_ = 0;
};

}  // namespace qpb
