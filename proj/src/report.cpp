#include "qpb/report.hpp"

#include <sstream>

namespace qpb {

const char* status_name(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::skipped: return "skipped";
    }
    return "?";
}

bool Report::ok() const { return failures() == 0; }

int Report::failures() const {
    int n = 0;
    for (const auto& c : checks)
        if (c.status == Status::fail) ++n;
    return n;
}

const Check* Report::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

bool Report::passed(const std::string& name) const {
    const Check* c = find(name);
    return c && c->status == Status::pass;
}

Check& Report::add(const std::string& name, bool ok, const std::string& witness, int cases) {
    Check c;
    c.name = name;
    c.status = ok ? Status::pass : Status::fail;
    if (!ok) c.witness = witness;
    c.cases = cases;
    checks.push_back(std::move(c));
    return checks.back();
}

void Report::skip(const std::string& name, const std::string& why) {
    Check c;
    c.name = name;
    c.status = Status::skipped;
    c.witness = why;
    checks.push_back(std::move(c));
}

void Report::merge(const Report& other, const std::string& prefix) {
    for (auto c : other.checks) {
        if (!prefix.empty()) c.name = prefix + "." + c.name;
        checks.push_back(std::move(c));
    }
}

std::string Report::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << status_name(c.status) << "  " << c.name;
        if (!c.witness.empty()) os << "  [" << c.witness << "]";
        os << "\n";
    }
    return os.str();
}

}  // namespace qpb
