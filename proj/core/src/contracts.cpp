#include "des/contracts.hpp"

#include <algorithm>
#include <sstream>

namespace des::contracts {

namespace {

constexpr std::string_view kFactorySeed = "sys:factory";
constexpr std::string_view kRegistrySeed = "sys:registry";
constexpr std::string_view kAuthoritySeed = "sys:authority";

std::vector<std::string> split_tokens(std::string_view payload) {
    std::vector<std::string> out;
    std::istringstream is{std::string(payload)};
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

// "key=value" accessor for strictly ordered payload tokens.
std::optional<std::string> kv(const std::vector<std::string>& tokens, std::size_t index,
                              std::string_view key) {
    if (index >= tokens.size()) return std::nullopt;
    const std::string& tok = tokens[index];
    std::string prefix = std::string(key) + "=";
    if (tok.rfind(prefix, 0) != 0) return std::nullopt;
    return tok.substr(prefix.size());
}

std::optional<std::uint64_t> to_u64(const std::optional<std::string>& s) {
    if (!s || s->empty()) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : *s) {
        if (c < '0' || c > '9') return std::nullopt;
        if (v > (UINT64_MAX - (c - '0')) / 10) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

}  // namespace

Result<Amount> JobOffer::required_deposit() const {
    unsigned __int128 v = positions;
    v *= workdays;
    v *= hours_per_day;
    v *= time_wage;
    if (v > static_cast<unsigned __int128>(UINT64_MAX)) {
        return make_error(Errc::invalid_argument, "deposit overflows the token range");
    }
    return static_cast<Amount>(v);
}

Digest identification_code(const Address& application_addr, const Address& worker,
                           std::uint64_t offer_height) {
    HashWriter w;
    w.field(application_addr.bytes);
    w.field(worker.bytes);
    w.field_u64(offer_height);
    return w.digest();
}

Digest certification_code(const Address& relationship_addr, std::uint64_t final_height,
                          const std::vector<std::pair<Address, Amount>>& payments) {
    HashWriter w;
    w.field(relationship_addr.bytes);
    w.field_u64(final_height);
    for (const auto& [worker, amount] : payments) {
        w.field(worker.bytes);
        w.field_u64(amount);
    }
    return w.digest();
}

std::string deploy_payload(const JobOffer& offer) {
    std::ostringstream os;
    os << "deploy_job k=" << offer.positions << " n=" << offer.workdays
       << " hours=" << offer.hours_per_day << " wage=" << offer.time_wage
       << " certify=" << (offer.certify ? 1 : 0) << " desc=" << trace::pct_encode(offer.description);
    return os.str();
}

std::string apply_payload() {
    return "apply";
}

std::string hire_payload(const Address& worker, const Digest& code) {
    return "hire worker=" + worker.hex() + " code=" + digest_hex(code);
}

std::string workday_payload(const Address& worker) {
    return "workday worker=" + worker.hex();
}

std::string payment_payload(const Address& worker, Amount amount) {
    return "payment worker=" + worker.hex() + " amount=" + std::to_string(amount);
}

std::string register_payload(lifecycle::Role role, const Address& addr) {
    return std::string("register role=") + std::string(lifecycle::to_string(role)) +
           " addr=" + addr.hex();
}

Engine::Engine(ledger::Ledger& led, trace::TraceSink* sink) : ledger_(led), sink_(sink) {
    auto ensure = [&](std::string_view seed) {
        Address addr = Address::from_seed(seed);
        if (!ledger_.account_exists(addr)) {
            (void)ledger_.create_account(seed);
        }
        return addr;
    };
    factory_ = ensure(kFactorySeed);
    registry_addr_ = ensure(kRegistrySeed);
    authority_ = ensure(kAuthoritySeed);
    ledger_.set_dispatcher(this);
}

bool Engine::handles(const Address& recipient) const {
    return recipient == factory_ || recipient == registry_addr_ ||
           by_contract_.count(recipient) != 0;
}

void Engine::emit(trace::Record record) {
    if (sink_) sink_->emit(std::move(record));
}

trace::Record Engine::base_record(const ledger::Transaction& tx, std::uint64_t height,
                                  trace::Kind kind, std::optional<Address> job) const {
    trace::Record r;
    r.height = height;
    r.tx_id = tx.tx_id;
    r.kind = kind;
    r.actor = tx.sender;
    r.job = job;
    return r;
}

std::string Engine::execute(const ledger::Transaction& tx, std::uint64_t height) {
    if (tx.recipient == factory_) return do_deploy(tx, height);
    if (tx.recipient == registry_addr_) return do_register(tx, height);
    auto rel_it = by_contract_.find(tx.recipient);
    if (rel_it == by_contract_.end()) return errc_token(Errc::unknown_contract);
    Job& job = jobs_.at(rel_it->second);

    auto tokens = split_tokens(tx.payload);
    const std::string fn = tokens.empty() ? std::string() : tokens[0];
    if (tx.recipient == job.addrs.application && fn == "apply") return do_apply(job, tx, height);
    if (tx.recipient == job.addrs.relationship && fn == "hire") return do_hire(job, tx, height);
    if (tx.recipient == job.addrs.relationship && fn == "workday") {
        return do_workday(job, tx, height);
    }
    if (tx.recipient == job.addrs.deposit && fn == "payment") {
        auto worker_hex = kv(tokens, 1, "worker");
        auto amount = to_u64(kv(tokens, 2, "amount"));
        std::optional<Address> worker;
        if (worker_hex) worker = Address::parse_hex(*worker_hex);
        if (!worker || !amount || tokens.size() != 3) return errc_token(Errc::bad_call);
        return pay_worker(job, tx.sender, *worker, *amount, tx.tx_id, height);
    }
    return errc_token(Errc::bad_call);
}

std::string Engine::do_deploy(const ledger::Transaction& tx, std::uint64_t height) {
    auto fail = [&](Errc code) {
        auto r = base_record(tx, height, trace::Kind::new_job_offer, std::nullopt);
        r.ok = false;
        r.reason = errc_token(code);
        emit(std::move(r));
        return std::string(errc_token(code));
    };
    auto tokens = split_tokens(tx.payload);
    if (tokens.empty() || tokens[0] != "deploy_job" || tokens.size() != 7) {
        return errc_token(Errc::bad_call);
    }
    JobOffer offer;
    offer.employer = tx.sender;
    auto k = to_u64(kv(tokens, 1, "k"));
    auto n = to_u64(kv(tokens, 2, "n"));
    auto hours = to_u64(kv(tokens, 3, "hours"));
    auto wage = to_u64(kv(tokens, 4, "wage"));
    auto certify = to_u64(kv(tokens, 5, "certify"));
    auto desc = kv(tokens, 6, "desc");
    if (!k || !n || !hours || !wage || !certify || !desc || *certify > 1) {
        return errc_token(Errc::bad_call);
    }
    auto decoded = trace::pct_decode(*desc);
    if (!decoded) return errc_token(Errc::bad_call);
    offer.positions = *k;
    offer.workdays = *n;
    offer.hours_per_day = *hours;
    offer.time_wage = *wage;
    offer.certify = *certify == 1;
    offer.description = decoded.value();
    if (offer.positions < 1 || offer.workdays < 1 || offer.hours_per_day < 1) {
        return fail(Errc::bad_call);
    }
    if (!registry_.is_employer(tx.sender)) return fail(Errc::unauthorized);
    auto required = offer.required_deposit();
    if (!required) return fail(Errc::bad_call);
    if (tx.amount != required.value()) return fail(Errc::bad_deposit);
    auto balance = ledger_.balance(tx.sender);
    if (!balance || balance.value() < tx.amount) return fail(Errc::overdraw);

    std::string tag = tx.sender.hex() + ":" + std::to_string(tx.nonce);
    auto deposit = ledger_.create_account_in_seal("sc:deposit:" + tag);
    auto application = ledger_.create_account_in_seal("sc:application:" + tag);
    auto relationship = ledger_.create_account_in_seal("sc:relationship:" + tag);
    if (!deposit || !application || !relationship) return fail(Errc::bad_call);

    Job job;
    job.addrs = JobAddresses{deposit.value(), application.value(), relationship.value()};
    job.deposit = DepositState{relationship.value(), application.value()};
    job.application.offer = offer;
    job.application.offer_height = height;
    job.application.relationship_addr = relationship.value();
    job.application.deposit_addr = deposit.value();
    job.relationship.deposit_addr = deposit.value();
    job.relationship.application_addr = application.value();
    job.milestones.deployed_at = height;

    Status moved = ledger_.transfer_in_seal(tx.sender, deposit.value(), tx.amount);
    if (!moved) return fail(Errc::overdraw);

    by_contract_[deposit.value()] = relationship.value();
    by_contract_[application.value()] = relationship.value();
    by_contract_[relationship.value()] = relationship.value();
    jobs_[relationship.value()] = std::move(job);
    job_order_.push_back(relationship.value());

    auto r = base_record(tx, height, trace::Kind::new_job_offer, relationship.value());
    r.details.emplace_back("k", std::to_string(offer.positions));
    r.details.emplace_back("n", std::to_string(offer.workdays));
    r.details.emplace_back("hours", std::to_string(offer.hours_per_day));
    r.details.emplace_back("wage", std::to_string(offer.time_wage));
    r.details.emplace_back("deposit", std::to_string(tx.amount));
    r.details.emplace_back("certify", offer.certify ? "1" : "0");
    r.details.emplace_back("deposit_addr", deposit.value().hex());
    r.details.emplace_back("application_addr", application.value().hex());
    emit(std::move(r));
    return {};
}

std::string Engine::do_register(const ledger::Transaction& tx, std::uint64_t height) {
    auto tokens = split_tokens(tx.payload);
    auto role_tok = kv(tokens, 1, "role");
    auto addr_hex = kv(tokens, 2, "addr");
    if (tokens.size() != 3 || tokens[0] != "register" || !role_tok || !addr_hex ||
        tx.amount != 0) {
        return errc_token(Errc::bad_call);
    }
    auto role = lifecycle::role_from_token(*role_tok);
    auto addr = Address::parse_hex(*addr_hex);
    if (!role || !addr) return errc_token(Errc::bad_call);

    auto record = [&](bool ok, std::string reason) {
        auto r = base_record(tx, height, trace::Kind::register_role, std::nullopt);
        r.actor = *addr;
        r.ok = ok;
        r.reason = std::move(reason);
        r.details.emplace_back("role", std::string(lifecycle::to_string(*role)));
        emit(std::move(r));
    };
    if (tx.sender != authority_) {
        record(false, errc_token(Errc::unauthorized));
        return errc_token(Errc::unauthorized);
    }
    Status s = lifecycle::register_member(
        registry_, *role, *addr, [&](const Address& a) { return ledger_.account_exists(a); });
    if (!s) {
        record(false, errc_token(s.error().code));
        return errc_token(s.error().code);
    }
    record(true, {});
    return {};
}

bool Engine::job_closed(const Job& job) const {
    return job.relationship.concluded.size() == job.application.offer.positions;
}

std::string Engine::do_apply(Job& job, const ledger::Transaction& tx, std::uint64_t height) {
    auto fail = [&](Errc code) {
        auto r = base_record(tx, height, trace::Kind::application, job.addrs.relationship);
        r.ok = false;
        r.reason = errc_token(code);
        emit(std::move(r));
        return std::string(errc_token(code));
    };
    if (tx.payload != apply_payload() || tx.amount != 0) return fail(Errc::bad_call);
    if (!registry_.is_worker(tx.sender)) return fail(Errc::unauthorized);
    if (job_closed(job)) return fail(Errc::closed);

    auto [it, inserted] = job.application.codes.try_emplace(
        tx.sender,
        identification_code(job.addrs.application, tx.sender, job.application.offer_height));
    auto r = base_record(tx, height, trace::Kind::application, job.addrs.relationship);
    r.details.emplace_back("code", digest_hex(it->second));
    r.details.emplace_back("repeat", inserted ? "0" : "1");
    emit(std::move(r));
    return {};
}

std::string Engine::do_hire(Job& job, const ledger::Transaction& tx, std::uint64_t height) {
    auto fail = [&](Errc code) {
        auto r = base_record(tx, height, trace::Kind::hiring, job.addrs.relationship);
        r.ok = false;
        r.reason = errc_token(code);
        emit(std::move(r));
        return std::string(errc_token(code));
    };
    auto tokens = split_tokens(tx.payload);
    auto worker_hex = kv(tokens, 1, "worker");
    auto code_hex = kv(tokens, 2, "code");
    if (tokens.size() != 3 || !worker_hex || !code_hex || tx.amount != 0) {
        return fail(Errc::bad_call);
    }
    auto worker = Address::parse_hex(*worker_hex);
    auto code = digest_from_hex(*code_hex);
    if (!worker || !code) return fail(Errc::bad_call);

    const JobOffer& offer = job.application.offer;
    if (tx.sender != offer.employer) return fail(Errc::unauthorized);
    auto stored = job.application.codes.find(*worker);
    if (stored == job.application.codes.end() || stored->second != code.value()) {
        return fail(Errc::bad_code);
    }
    auto& rel = job.relationship;
    if (rel.hired.count(*worker) || rel.concluded.count(*worker)) {
        return fail(Errc::duplicate_hire);
    }
    if (rel.hired.size() + rel.concluded.size() >= offer.positions) {
        return fail(Errc::capacity);
    }
    bool first = rel.hired.empty() && rel.concluded.empty();
    rel.hired[*worker] = 0;
    if (!job.milestones.first_hire_at) job.milestones.first_hire_at = height;

    auto r = base_record(tx, height, trace::Kind::hiring, job.addrs.relationship);
    r.details.emplace_back("worker", worker->hex());
    r.details.emplace_back("first", first ? "1" : "0");
    emit(std::move(r));
    return {};
}

std::string Engine::do_workday(Job& job, const ledger::Transaction& tx, std::uint64_t height) {
    auto fail = [&](Errc code) {
        auto r = base_record(tx, height, trace::Kind::workday, job.addrs.relationship);
        r.ok = false;
        r.reason = errc_token(code);
        emit(std::move(r));
        return std::string(errc_token(code));
    };
    auto tokens = split_tokens(tx.payload);
    auto worker_hex = kv(tokens, 1, "worker");
    if (tokens.size() != 2 || !worker_hex || tx.amount != 0) return fail(Errc::bad_call);
    auto worker = Address::parse_hex(*worker_hex);
    if (!worker) return fail(Errc::bad_call);

    const JobOffer& offer = job.application.offer;
    auto& rel = job.relationship;
    if (tx.sender != offer.employer) return fail(Errc::unauthorized);
    if (rel.concluded.count(*worker)) return fail(Errc::overrun);
    auto hired_it = rel.hired.find(*worker);
    if (hired_it == rel.hired.end()) return fail(Errc::not_hired);

    std::uint64_t new_hours = hired_it->second + offer.hours_per_day;
    if (new_hours < offer.agreed_hours()) {
        hired_it->second = new_hours;
        auto r = base_record(tx, height, trace::Kind::workday, job.addrs.relationship);
        r.details.emplace_back("worker", worker->hex());
        r.details.emplace_back("hours", std::to_string(new_hours));
        emit(std::move(r));
        return {};
    }

    // Final workday: the agreed hours are complete, the relationship contract
    // calls the deposit's payment for this worker.
    std::string paid = pay_worker(job, job.addrs.relationship, *worker, offer.wage_total(),
                                  tx.tx_id, height);
    if (!paid.empty()) return fail(Errc::escrow_underflow);
    hired_it = rel.hired.find(*worker);  // map untouched by pay_worker, but re-find for clarity
    rel.hired.erase(hired_it);
    rel.concluded.insert(*worker);

    auto r = base_record(tx, height, trace::Kind::workday, job.addrs.relationship);
    r.details.emplace_back("worker", worker->hex());
    r.details.emplace_back("hours", std::to_string(new_hours));
    emit(std::move(r));

    bool concludes = job_closed(job);
    trace::Record pr;
    pr.height = height;
    pr.tx_id = tx.tx_id;
    pr.kind = trace::Kind::payment;
    pr.actor = *worker;  // credited party
    pr.job = job.addrs.relationship;
    pr.details.emplace_back("worker", worker->hex());
    pr.details.emplace_back("amount", std::to_string(offer.wage_total()));
    pr.details.emplace_back("concludes", concludes ? "1" : "0");
    emit(std::move(pr));

    if (concludes) {
        job.milestones.concluded_at = height;
        if (offer.certify && !rel.certification) {
            rel.certification = certification_code(job.addrs.relationship, height, rel.payments);
            trace::Record cr;
            cr.height = height;
            cr.tx_id = tx.tx_id;
            cr.kind = trace::Kind::certification;
            cr.actor = offer.employer;
            cr.job = job.addrs.relationship;
            cr.details.emplace_back("code", digest_hex(*rel.certification));
            emit(std::move(cr));
        }
    }
    return {};
}

std::string Engine::pay_worker(Job& job, const Address& caller, const Address& worker,
                               Amount amount, const Digest& tx_id, std::uint64_t height) {
    auto fail = [&](Errc code) {
        trace::Record r;
        r.height = height;
        r.tx_id = tx_id;
        r.kind = trace::Kind::payment;
        r.actor = caller;
        r.job = job.addrs.relationship;
        r.ok = false;
        r.reason = errc_token(code);
        r.details.emplace_back("worker", worker.hex());
        r.details.emplace_back("amount", std::to_string(amount));
        emit(std::move(r));
        return std::string(errc_token(code));
    };
    // Only the relationship contract stored at deployment may release funds.
    if (caller != job.deposit.relationship_addr) return fail(Errc::sole_caller);
    if (amount != job.application.offer.wage_total()) return fail(Errc::bad_call);
    for (const auto& [w, _] : job.relationship.payments) {
        if (w == worker) return fail(Errc::double_pay);
    }
    Status moved = ledger_.transfer_in_seal(job.addrs.deposit, worker, amount);
    if (!moved) {
        return fail(moved.error().code == Errc::overdraw ? Errc::escrow_underflow
                                                         : moved.error().code);
    }
    job.relationship.payments.emplace_back(worker, amount);
    return {};
}

std::vector<Address> Engine::jobs() const {
    return job_order_;
}

Result<JobAddresses> Engine::job_addresses(const Address& relationship_addr) const {
    auto it = jobs_.find(relationship_addr);
    if (it == jobs_.end()) {
        return make_error(Errc::unknown_contract, "no job at " + relationship_addr.hex());
    }
    return it->second.addrs;
}

Result<RelationshipView> Engine::query_relationship(const Address& relationship_addr) const {
    auto it = jobs_.find(relationship_addr);
    if (it == jobs_.end()) {
        return make_error(Errc::unknown_contract, "no job at " + relationship_addr.hex());
    }
    const Job& job = it->second;
    RelationshipView view;
    view.offer = job.application.offer;
    view.addresses = job.addrs;
    view.offer_height = job.application.offer_height;
    view.applicants = job.application.codes;
    view.hired = job.relationship.hired;
    view.concluded = job.relationship.concluded;
    view.payments = job.relationship.payments;
    view.certification = job.relationship.certification;
    auto escrow = ledger_.balance(job.addrs.deposit);
    view.escrow = escrow ? escrow.value() : 0;
    view.closed = job_closed(job);
    return view;
}

Result<lifecycle::JobMilestones> Engine::milestones(const Address& relationship_addr) const {
    auto it = jobs_.find(relationship_addr);
    if (it == jobs_.end()) {
        return make_error(Errc::unknown_contract, "no job at " + relationship_addr.hex());
    }
    return it->second.milestones;
}

lifecycle::Phase Engine::derived_state(const Address& relationship_addr,
                                       std::uint64_t height) const {
    auto it = jobs_.find(relationship_addr);
    if (it == jobs_.end()) return lifecycle::Phase::idle;
    return lifecycle::derive_state(it->second.milestones, height);
}

}  // namespace des::contracts
