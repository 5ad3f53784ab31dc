#include "des/trace.hpp"

#include <sstream>

namespace des::trace {

std::string_view kind_token(Kind kind) {
    switch (kind) {
        case Kind::genesis: return "genesis";
        case Kind::register_role: return "register";
        case Kind::transfer: return "transfer";
        case Kind::new_job_offer: return "new_job_offer";
        case Kind::application: return "application";
        case Kind::hiring: return "hiring";
        case Kind::workday: return "workday";
        case Kind::payment: return "payment";
        case Kind::certification: return "certification";
    }
    return "unknown";
}

std::optional<Kind> kind_from_token(std::string_view token) {
    for (Kind k : {Kind::genesis, Kind::register_role, Kind::transfer, Kind::new_job_offer,
                   Kind::application, Kind::hiring, Kind::workday, Kind::payment,
                   Kind::certification}) {
        if (kind_token(k) == token) return k;
    }
    return std::nullopt;
}

std::optional<std::string> Record::detail(std::string_view key) const {
    for (const auto& [k, v] : details) {
        if (k == key) return v;
    }
    return std::nullopt;
}

static bool needs_escape(char c) {
    return c == '%' || c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '-';
}

std::string pct_encode(std::string_view raw) {
    if (raw.empty()) return "-";
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        if (needs_escape(c)) {
            auto b = static_cast<unsigned char>(c);
            out.push_back('%');
            out.push_back(hex[b >> 4]);
            out.push_back(hex[b & 0x0f]);
        } else {
            out.push_back(c);
        }
    }
    return out;
}

Result<std::string> pct_decode(std::string_view encoded) {
    if (encoded == "-") return std::string();
    std::string out;
    out.reserve(encoded.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        if (encoded[i] != '%') {
            out.push_back(encoded[i]);
            continue;
        }
        if (i + 2 >= encoded.size()) {
            return make_error(Errc::parse_error, "truncated escape");
        }
        auto bytes = from_hex(encoded.substr(i + 1, 2));
        if (!bytes || bytes.value().size() != 1) {
            return make_error(Errc::parse_error, "bad escape");
        }
        out.push_back(static_cast<char>(bytes.value()[0]));
        i += 2;
    }
    return out;
}

std::string to_line(const Record& record) {
    std::ostringstream os;
    os << record.height << ' ';
    os << (record.tx_id ? digest_hex(*record.tx_id) : std::string("-")) << ' ';
    os << kind_token(record.kind) << ' ';
    os << record.actor.hex() << ' ';
    os << (record.job ? record.job->hex() : std::string("-")) << ' ';
    if (record.ok) {
        os << "ok";
    } else {
        os << "failed:" << record.reason;
    }
    std::string kv;
    for (const auto& [k, v] : record.details) {
        if (!kv.empty()) kv.push_back(';');
        kv += k;
        kv.push_back('=');
        kv += v;
    }
    os << ' ' << pct_encode(kv);
    return os.str();
}

static std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream is{std::string(line)};
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

Result<Record> record_from_line(std::string_view line) {
    auto tok = split_ws(line);
    if (tok.size() != 7) {
        return make_error(Errc::parse_error, "trace record wants 7 fields");
    }
    Record r;
    try {
        r.height = std::stoull(tok[0]);
    } catch (...) {
        return make_error(Errc::parse_error, "bad height");
    }
    if (tok[1] != "-") {
        auto d = digest_from_hex(tok[1]);
        if (!d) return d.error();
        r.tx_id = d.value();
    }
    auto kind = kind_from_token(tok[2]);
    if (!kind) return make_error(Errc::parse_error, "unknown record kind: " + tok[2]);
    r.kind = *kind;
    auto actor = Address::parse_hex(tok[3]);
    if (!actor) return make_error(Errc::parse_error, "bad actor address");
    r.actor = *actor;
    if (tok[4] != "-") {
        auto job = Address::parse_hex(tok[4]);
        if (!job) return make_error(Errc::parse_error, "bad job address");
        r.job = *job;
    }
    if (tok[5] == "ok") {
        r.ok = true;
    } else if (tok[5].rfind("failed:", 0) == 0) {
        r.ok = false;
        r.reason = tok[5].substr(7);
    } else {
        return make_error(Errc::parse_error, "bad outcome: " + tok[5]);
    }
    auto kv = pct_decode(tok[6]);
    if (!kv) return kv.error();
    std::string_view rest = kv.value();
    while (!rest.empty()) {
        auto semi = rest.find(';');
        std::string_view item = rest.substr(0, semi);
        rest = semi == std::string_view::npos ? std::string_view() : rest.substr(semi + 1);
        auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            return make_error(Errc::parse_error, "bad detail item");
        }
        r.details.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    }
    return r;
}

std::string to_text(const Trace& trace) {
    std::string out = "destrc 1\n";
    for (const auto& r : trace) {
        out += to_line(r);
        out.push_back('\n');
    }
    return out;
}

Result<Trace> trace_from_text(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != "destrc 1") {
        return make_error(Errc::parse_error, "missing destrc 1 header");
    }
    Trace out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto rec = record_from_line(line);
        if (!rec) return rec.error();
        out.push_back(std::move(rec.value()));
    }
    return out;
}

}  // namespace des::trace
