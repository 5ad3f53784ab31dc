#include "des/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "des/trace.hpp"

namespace des::harness {

namespace {

Error at_line(std::size_t lineno, const std::string& what) {
    return make_error(Errc::parse_error, "line " + std::to_string(lineno) + ": " + what);
}

std::optional<std::uint64_t> to_u64(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        if (v > (UINT64_MAX - (c - '0')) / 10) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

}  // namespace

Result<Scenario> Scenario::parse(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line) || line != "desscn 1") {
        return make_error(Errc::parse_error, "line 1: missing desscn 1 header");
    }
    lineno = 1;
    Scenario sc;
    std::set<std::string> declared;
    std::set<std::string> job_names;

    auto want_actor = [&](const std::string& name) -> Status {
        if (!declared.count(name)) {
            return at_line(lineno, "undeclared actor " + name);
        }
        return Status::success();
    };
    auto want_job = [&](const std::string& name) -> Status {
        if (!job_names.count(name)) {
            return at_line(lineno, "unknown job " + name);
        }
        return Status::success();
    };

    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls{line};
        std::string verb;
        ls >> verb;
        Step step;
        step.line = lineno;

        if (verb == "seed") {
            std::string v;
            if (!(ls >> v)) return at_line(lineno, "seed wants a value");
            auto u = to_u64(v);
            if (!u) return at_line(lineno, "bad seed value");
            sc.seed = *u;
        } else if (verb == "genesis") {
            std::string seedname, amount;
            if (!(ls >> seedname >> amount)) return at_line(lineno, "genesis wants seed amount");
            auto u = to_u64(amount);
            if (!u) return at_line(lineno, "bad genesis amount");
            if (declared.count(seedname)) return at_line(lineno, "duplicate actor " + seedname);
            declared.insert(seedname);
            sc.genesis.push_back(ledger::GenesisEntry{seedname, *u});
        } else if (verb == "employer" || verb == "worker") {
            std::string seedname;
            if (!(ls >> seedname)) return at_line(lineno, verb + " wants a seed");
            if (!declared.count(seedname)) {
                declared.insert(seedname);
                sc.genesis.push_back(ledger::GenesisEntry{seedname, 0});
            }
            (verb == "employer" ? sc.employers : sc.workers).push_back(seedname);
        } else if (verb == "deploy") {
            step.kind = Step::Kind::deploy;
            std::string jobname;
            if (!(ls >> step.actor >> jobname)) return at_line(lineno, "deploy wants actor job");
            if (auto s = want_actor(step.actor); !s) return s.error();
            if (job_names.count(jobname)) return at_line(lineno, "duplicate job " + jobname);
            step.job = jobname;
            step.offer.certify = true;
            bool have_k = false, have_n = false, have_hours = false, have_wage = false;
            std::string opt;
            while (ls >> opt) {
                auto eq = opt.find('=');
                if (eq == std::string::npos) return at_line(lineno, "bad option " + opt);
                std::string key = opt.substr(0, eq);
                std::string value = opt.substr(eq + 1);
                if (key == "desc") {
                    auto d = trace::pct_decode(value);
                    if (!d) return at_line(lineno, "bad desc encoding");
                    step.offer.description = d.value();
                    continue;
                }
                auto u = to_u64(value);
                if (!u) return at_line(lineno, "bad value for " + key);
                if (key == "k") {
                    step.offer.positions = *u;
                    have_k = true;
                } else if (key == "n") {
                    step.offer.workdays = *u;
                    have_n = true;
                } else if (key == "hours") {
                    step.offer.hours_per_day = *u;
                    have_hours = true;
                } else if (key == "wage") {
                    step.offer.time_wage = *u;
                    have_wage = true;
                } else if (key == "certify") {
                    if (*u > 1) return at_line(lineno, "certify wants 0 or 1");
                    step.offer.certify = *u == 1;
                } else if (key == "deposit") {
                    step.deposit_override = *u;
                } else {
                    return at_line(lineno, "unknown option " + key);
                }
            }
            if (!have_k || !have_n || !have_hours || !have_wage) {
                return at_line(lineno, "deploy wants k= n= hours= wage=");
            }
            job_names.insert(jobname);
            sc.steps.push_back(std::move(step));
        } else if (verb == "apply") {
            step.kind = Step::Kind::apply;
            if (!(ls >> step.actor >> step.job)) return at_line(lineno, "apply wants actor job");
            if (auto s = want_actor(step.actor); !s) return s.error();
            if (auto s = want_job(step.job); !s) return s.error();
            sc.steps.push_back(std::move(step));
        } else if (verb == "hire" || verb == "hire_code") {
            step.kind = verb == "hire" ? Step::Kind::hire : Step::Kind::hire_code;
            if (!(ls >> step.actor >> step.job >> step.worker)) {
                return at_line(lineno, verb + " wants actor job worker");
            }
            if (step.kind == Step::Kind::hire_code && !(ls >> step.code_hex)) {
                return at_line(lineno, "hire_code wants a code");
            }
            if (auto s = want_actor(step.actor); !s) return s.error();
            if (auto s = want_actor(step.worker); !s) return s.error();
            if (auto s = want_job(step.job); !s) return s.error();
            sc.steps.push_back(std::move(step));
        } else if (verb == "workday") {
            step.kind = Step::Kind::workday;
            if (!(ls >> step.actor >> step.job >> step.worker)) {
                return at_line(lineno, "workday wants actor job worker");
            }
            if (auto s = want_actor(step.actor); !s) return s.error();
            if (auto s = want_actor(step.worker); !s) return s.error();
            if (auto s = want_job(step.job); !s) return s.error();
            sc.steps.push_back(std::move(step));
        } else if (verb == "pay") {
            step.kind = Step::Kind::pay;
            std::string amount;
            if (!(ls >> step.actor >> step.job >> step.worker >> amount)) {
                return at_line(lineno, "pay wants caller job worker amount");
            }
            auto u = to_u64(amount);
            if (!u) return at_line(lineno, "bad pay amount");
            step.amount = *u;
            if (auto s = want_actor(step.actor); !s) return s.error();
            if (auto s = want_actor(step.worker); !s) return s.error();
            if (auto s = want_job(step.job); !s) return s.error();
            sc.steps.push_back(std::move(step));
        } else if (verb == "transfer") {
            step.kind = Step::Kind::transfer;
            std::string amount;
            if (!(ls >> step.actor >> step.to >> amount)) {
                return at_line(lineno, "transfer wants from to amount");
            }
            auto u = to_u64(amount);
            if (!u) return at_line(lineno, "bad transfer amount");
            step.amount = *u;
            if (auto s = want_actor(step.actor); !s) return s.error();
            if (auto s = want_actor(step.to); !s) return s.error();
            sc.steps.push_back(std::move(step));
        } else if (verb == "seal") {
            step.kind = Step::Kind::seal;
            sc.steps.push_back(std::move(step));
        } else if (verb == "query") {
            step.kind = Step::Kind::query;
            if (!(ls >> step.job)) return at_line(lineno, "query wants a job");
            if (auto s = want_job(step.job); !s) return s.error();
            sc.steps.push_back(std::move(step));
        } else if (verb == "tamper") {
            step.kind = Step::Kind::tamper;
            std::string height, offset;
            if (!(ls >> height >> offset)) return at_line(lineno, "tamper wants height offset");
            auto h = to_u64(height);
            auto o = to_u64(offset);
            if (!h || !o) return at_line(lineno, "bad tamper operand");
            step.height = *h;
            step.offset = static_cast<std::size_t>(*o);
            std::string mask;
            if (ls >> mask) {
                auto m = to_u64(mask);
                if (!m || *m == 0 || *m > 255) return at_line(lineno, "bad xor mask");
                step.xor_mask = static_cast<std::uint8_t>(*m);
            }
            sc.steps.push_back(std::move(step));
        } else if (verb == "expect") {
            std::string subject, value;
            if (!(ls >> subject >> value)) return at_line(lineno, "expect wants subject value");
            Expectation e;
            if (subject == "fsm") {
                e.subject = Expectation::Subject::fsm;
            } else if (subject == "net") {
                e.subject = Expectation::Subject::net;
            } else if (subject == "chain") {
                e.subject = Expectation::Subject::chain;
            } else {
                return at_line(lineno, "unknown expect subject " + subject);
            }
            if (value == "conformant" || value == "valid") {
                e.positive = true;
            } else if (value == "violation" || value == "invalid") {
                e.positive = false;
            } else {
                return at_line(lineno, "unknown expect value " + value);
            }
            sc.expects.push_back(e);
        } else {
            return at_line(lineno, "unknown verb " + verb);
        }
    }
    return sc;
}

Result<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return make_error(Errc::io_error, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Status write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return make_error(Errc::io_error, "cannot write " + path);
    out << content;
    return Status::success();
}

}  // namespace des::harness
