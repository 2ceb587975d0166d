// remo: command-line front end for the MMRFD/REMO model.
//
// Exit status: 0 success, 1 invariant or verification failure, 2 bad
// configuration. Output files are written only after the command succeeded.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "remo/remo.hpp"

using namespace remo;

namespace {

constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;

/// "1,3,5", "1-7" or a mix such as "1-3,11".
std::vector<unsigned> parse_uint_list(const std::vector<std::string>& items)
{
    std::vector<unsigned> out;
    auto number = [](const std::string& s) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (s.empty() || used != s.size() || s[0] == '-')
            throw Error(ErrorCode::ParseError, "not a non-negative integer: '" + s + "'");
        return static_cast<unsigned>(v);
    };
    for (const auto& item : items) {
        const auto dash = item.find('-', 1);
        if (dash == std::string::npos) {
            out.push_back(number(item));
            continue;
        }
        const unsigned lo = number(item.substr(0, dash)), hi = number(item.substr(dash + 1));
        if (lo > hi)
            throw Error(ErrorCode::ParseError, "empty range '" + item + "'");
        for (unsigned v = lo; v <= hi; ++v)
            out.push_back(v);
    }
    return out;
}

template <class T, class Parse>
std::vector<T> parse_names(const std::vector<std::string>& items, Parse parse)
{
    std::vector<T> out;
    for (const auto& s : items)
        out.push_back(parse(s));
    return out;
}

enum class Format { Csv, Json, Md, Text };

Format parse_format(const std::string& s)
{
    if (s == "csv")
        return Format::Csv;
    if (s == "json")
        return Format::Json;
    if (s == "md")
        return Format::Md;
    if (s == "text")
        return Format::Text;
    throw Error(ErrorCode::ParseError, "unknown format '" + s + "'");
}

/// Writes `text` to `path`, or to stdout when path is empty.
void emit(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::InvalidConfig, "cannot open '" + path + "' for writing");
    f << text;
    if (!f)
        throw Error(ErrorCode::InvalidConfig, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::InvalidConfig, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Parameter selection shared by trace and ntt: a preset, then overrides.
struct ParamArgs {
    std::string preset = "kyber";
    std::optional<std::uint64_t> q, n;
    std::optional<unsigned> l;
    unsigned w = kDefaultWordSize;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--preset", preset, "kyber | dilithium | falcon | ntru")->capture_default_str();
        cmd->add_option("--q", q, "modulus (overrides preset)");
        cmd->add_option("--l", l, "operand width in bits (overrides preset)");
        cmd->add_option("--w", w, "word size")->capture_default_str();
        cmd->add_option("--n", n, "transform size (overrides preset)");
    }

    ParamSet resolve() const
    {
        const auto& info = preset_info(preset);
        return derive(q.value_or(info.q), l.value_or(info.l), w, n.value_or(info.n));
    }
};

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::uint64_t samples = 10000;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> Ks{1, 2, 7};
    std::string golden;
    std::string format = "text";
    std::string out;
};

struct CheckLog {
    nlohmann::json checks = nlohmann::json::array();
    std::ostringstream text;
    bool ok = true;

    void record(const std::string& name, bool pass, const std::string& detail, bool informational = false)
    {
        checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail}, {"informational", informational}});
        text << (informational ? "INFO" : pass ? "PASS" : "FAIL") << "  " << name << ": " << detail << '\n';
        if (!informational && !pass)
            ok = false;
    }
};

std::map<std::string, HitCounts> builtin_hits()
{
    std::map<std::string, HitCounts> out;
    const std::pair<const char*, std::array<std::uint64_t, 3>> table[] = {
        {"kyber512", {17, 34816, 17408}}, {"kyber768", {24, 49152, 24576}}, {"kyber1024", {31, 63488, 31744}}};
    for (const auto& [name, v] : table)
        out[name] = HitCounts{v[0], v[1], v[2], {}};
    return out;
}

std::map<std::string, HitCounts> load_golden_hits(const std::string& path)
{
    std::istringstream is(read_file(path));
    std::string line;
    std::map<std::string, HitCounts> out;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (header) {
            if (line != "variant,calls,ram_hits,rom_hits")
                throw Error(ErrorCode::ParseError, "golden hits header: " + line);
            header = false;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 4)
            throw Error(ErrorCode::ParseError, "golden hits row: " + line);
        parse_variant(f[0]);
        out[f[0]] = HitCounts{detail::parse_u64(f[1]), detail::parse_u64(f[2]), detail::parse_u64(f[3]), {}};
    }
    return out;
}

int cmd_verify(const VerifyArgs& a)
{
    const Format fmt = parse_format(a.format);
    if (fmt != Format::Text && fmt != Format::Json)
        throw Error(ErrorCode::InvalidConfig, "verify supports --format text or json");
    const auto golden = a.golden.empty() ? builtin_hits() : load_golden_hits(a.golden);
    CheckLog log;
    std::mt19937_64 rng(a.seed);

    // Oracle equivalence over every preset and word size.
    {
        std::uint64_t bad = 0, n = 0;
        for (const auto& info : kPresets)
            for (unsigned w : {2u, 4u, 8u}) {
                const auto ps = preset(info.name, w);
                for (std::uint64_t t = 0; t < a.samples; ++t, ++n) {
                    const std::uint64_t x = rng() & low_mask(ps.l), y = rng() & low_mask(ps.l);
                    bad += mont_mul(x, y, ps) != mont_oracle(x, y, ps);
                }
            }
        const auto small = derive(13, 4, 2, 4);
        for (std::uint64_t x = 0; x < 16; ++x)
            for (std::uint64_t y = 0; y < 16; ++y, ++n)
                bad += mont_mul(x, y, small) != mont_oracle(x, y, small);
        log.record("oracle-equivalence", bad == 0,
                   std::to_string(n) + " products, " + std::to_string(bad) + " mismatches");
    }

    // Shadow congruence and fault-free flags.
    for (auto K : a.Ks) {
        std::uint64_t bad = 0, iters = 0;
        MmrfdOptions opts;
        opts.encoder.K = K;
        for (const auto& info : kPresets)
            for (unsigned w : {2u, 4u, 8u}) {
                const auto ps = preset(info.name, w);
                for (std::uint64_t t = 0; t < a.samples / 4 + 1; ++t) {
                    basic_mmrfd<u128>(rng() % ps.q, rng() % ps.q, ps, opts, [&](const IterationRecord<u128>& r) {
                        ++iters;
                        if (r.flag || r.gamma_f < r.gamma || (r.gamma_f - r.gamma) % ps.q != 0)
                            ++bad;
                    });
                }
            }
        log.record("congruence K=" + std::to_string(K), bad == 0,
                   std::to_string(iters) + " iterations, " + std::to_string(bad) + " violations");
    }
    {
        MmrfdOptions opts;
        opts.encoder.K = 0;
        opts.comparator = Comparator::Bitwise;
        const auto ps = preset("kyber");
        bool identical = true;
        for (int t = 0; t < 1000; ++t)
            identical = identical && !mmrfd_outcome(rng() % ps.q, rng() % ps.q, ps, opts).fault_any;
        log.record("K=0 shadow", identical, identical ? "bitwise equal to main path" : "differs from main path",
                   true);
    }

    // Transform round trip.
    for (const auto& info : kPresets) {
        const auto ps = preset(info.name);
        const auto tw = make_twiddles(ps);
        std::uint64_t bad = 0;
        for (int t = 0; t < 8; ++t) {
            Poly p{std::vector<std::uint64_t>(ps.n)};
            for (auto& c : p.coeffs)
                c = rng() % ps.q;
            bad += ntt_inverse(ntt_forward(p, tw, ps), tw, ps) != p;
        }
        log.record("ntt-roundtrip " + std::string(info.name), bad == 0,
                   "n=" + std::to_string(ps.n) + ", " + std::to_string(bad) + " failures");
    }

    // Rule checkers on fault-free traffic, and hit counts against the golden table.
    for (auto v : {KyberVariant::Kyber512, KyberVariant::Kyber768, KyberVariant::Kyber1024}) {
        const auto sched = kyber_flow(v);
        const auto rep = check_flow(sched, RuleSchedule::stage_aligned(sched.n));
        log.record("rule-checkers " + std::string(to_string(v)), rep.ram_violations + rep.rom_violations == 0,
                   std::to_string(rep.checked) + " accesses, " + std::to_string(rep.ram_violations) + " RAM / " +
                       std::to_string(rep.rom_violations) + " ROM violations");

        const auto h = count_hits(sched);
        const auto it = golden.find(std::string(to_string(v)));
        if (it == golden.end()) {
            log.record("hits " + std::string(to_string(v)), false, "missing from golden table");
            continue;
        }
        std::string diff;
        auto cmp = [&](const char* field, std::uint64_t want, std::uint64_t got) {
            if (want != got)
                diff += std::string(diff.empty() ? "" : "; ") + field + " expected " + std::to_string(want) +
                        ", computed " + std::to_string(got);
        };
        cmp("calls", it->second.calls, h.calls);
        cmp("ram_hits", it->second.ram_hits, h.ram_hits);
        cmp("rom_hits", it->second.rom_hits, h.rom_hits);
        log.record("hits " + std::string(to_string(v)), diff.empty(),
                   diff.empty() ? std::to_string(h.calls) + " / " + std::to_string(h.ram_hits) + " / " +
                                      std::to_string(h.rom_hits)
                                : diff);
    }

    if (fmt == Format::Json)
        emit(a.out, nlohmann::json{{"pass", log.ok}, {"checks", log.checks}}.dump(2) + "\n");
    else
        emit(a.out, log.text.str() + (log.ok ? "all checks passed\n" : "verification FAILED\n"));
    return log.ok ? 0 : kExitInvariant;
}

// ---------------------------------------------------------------------------
// campaigns

struct CampaignArgs {
    std::vector<std::string> ws{"2", "4", "8"};
    std::vector<std::string> etas;
    std::vector<std::string> targets;
    std::vector<std::string> modes{"random", "burst"};
    std::uint64_t samples = 100000;
    std::uint64_t runs = 100;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::uint64_t q = 3329;
    unsigned l = 24;
    std::uint64_t n = 256;
    std::uint64_t K = 1;
    std::string comparator = "modq";
    std::string path = "main";
    std::string variant = "kyber768";
    std::string ik_rule = "stage";
    std::string format = "csv";
    std::string out;
};

std::string render(const CampaignResult& res, Format fmt)
{
    switch (fmt) {
    case Format::Csv: return campaign_csv(res);
    case Format::Json: return campaign_json(res).dump(2) + "\n";
    default: {
        std::ostringstream os;
        write_campaign_markdown(os, res);
        return os.str();
    }
    }
}

/// Export goes to --out in --format; the markdown table goes to stdout.
/// Without --out the export itself goes to stdout.
void publish(const CampaignResult& res, const CampaignArgs& a)
{
    const Format fmt = parse_format(a.format);
    if (fmt == Format::Text)
        throw Error(ErrorCode::InvalidConfig, "campaign supports --format csv, json or md");
    const std::string body = render(res, fmt);
    if (a.out.empty()) {
        std::cout << body;
        return;
    }
    emit(a.out, body);
    std::cout << render(res, Format::Md);
}

int cmd_campaign_remo(const CampaignArgs& a)
{
    RemoCampaignConfig cfg;
    cfg.ws = parse_uint_list(a.ws);
    if (!a.etas.empty())
        cfg.etas = parse_uint_list(a.etas);
    if (!a.targets.empty())
        cfg.targets = parse_names<FaultTarget>(a.targets, parse_target);
    cfg.modes = parse_names<FaultMode>(a.modes, parse_mode);
    cfg.samples = a.samples;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    cfg.q = a.q;
    cfg.l = a.l;
    cfg.n = a.n;
    cfg.K = a.K;
    cfg.comparator = parse_comparator(a.comparator);
    cfg.path = parse_path(a.path);
    parse_format(a.format);
    cfg.validate();
    publish(run_remo_campaign(cfg), a);
    return 0;
}

int cmd_campaign_memory(const CampaignArgs& a)
{
    MemoryCampaignConfig cfg;
    cfg.variant = parse_variant(a.variant);
    if (!a.etas.empty())
        cfg.etas = parse_uint_list(a.etas);
    if (!a.targets.empty())
        cfg.targets = parse_names<FaultTarget>(a.targets, parse_target);
    cfg.modes = parse_names<FaultMode>(a.modes, parse_mode);
    cfg.runs = a.runs;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    cfg.rule = parse_rule(a.ik_rule);
    parse_format(a.format);
    cfg.validate();
    publish(run_memory_campaign(cfg), a);
    return 0;
}

// ---------------------------------------------------------------------------
// hits, sec, trace, ntt

int cmd_hits(const std::vector<std::string>& variants, const std::string& format, const std::string& out)
{
    const Format fmt = parse_format(format);
    std::vector<KyberVariant> vs;
    for (const auto& v : variants)
        vs.push_back(parse_variant(v));
    std::ostringstream os;
    nlohmann::json j = nlohmann::json::array();
    if (fmt == Format::Csv)
        os << "variant,phase,call,calls,ram_hits,rom_hits\n";
    for (auto v : vs) {
        const auto h = count_hits(kyber_flow(v));
        const std::string name(to_string(v));
        nlohmann::json rows = nlohmann::json::array();
        if (fmt == Format::Text || fmt == Format::Md) {
            os << name << "\n| Phase | Call | # NTT calls | RAM hits | ROM hits |\n|---|---|---|---|---|\n";
        }
        for (const auto& r : h.rows) {
            const std::string phase(to_string(r.phase));
            if (fmt == Format::Csv)
                os << name << ',' << phase << ',' << r.label << ',' << r.calls << ',' << r.ram_hits << ','
                   << r.rom_hits << '\n';
            else if (fmt == Format::Json)
                rows.push_back({{"phase", phase},
                                {"call", r.label},
                                {"calls", r.calls},
                                {"ram_hits", r.ram_hits},
                                {"rom_hits", r.rom_hits}});
            else
                os << "| " << phase << " | " << r.label << " | " << r.calls << " | " << r.ram_hits << " | "
                   << r.rom_hits << " |\n";
        }
        if (fmt == Format::Csv)
            os << name << ",Total,," << h.calls << ',' << h.ram_hits << ',' << h.rom_hits << '\n';
        else if (fmt == Format::Json)
            j.push_back({{"variant", name},
                         {"rows", rows},
                         {"total", {{"calls", h.calls}, {"ram_hits", h.ram_hits}, {"rom_hits", h.rom_hits}}}});
        else
            os << "| Total | | " << h.calls << " | " << h.ram_hits << " | " << h.rom_hits << " |\n\n";
    }
    emit(out, fmt == Format::Json ? j.dump(2) + "\n" : os.str());
    return 0;
}

struct TraceArgs {
    ParamArgs params;
    std::uint64_t alpha = 0, beta = 0, K = 1;
    std::string comparator = "modq";
    std::string path = "main";
    std::uint64_t fault_alpha = 0, fault_beta = 0;
    unsigned fault_from = 0;
    std::string format = "csv";
    std::string out;
};

int cmd_trace(const TraceArgs& a)
{
    const auto ps = a.params.resolve();
    const Format fmt = parse_format(a.format);
    if (fmt != Format::Csv && fmt != Format::Json)
        throw Error(ErrorCode::InvalidConfig, "trace supports --format csv or json");
    MmrfdOptions opts;
    opts.encoder.K = a.K;
    opts.comparator = parse_comparator(a.comparator);
    if (a.fault_alpha != 0 || a.fault_beta != 0)
        opts.fault = OperandFault{parse_path(a.path), a.fault_alpha, a.fault_beta, a.fault_from};
    const auto trace = mmrfd(a.alpha, a.beta, ps, opts);
    std::ostringstream os;
    if (fmt == Format::Json)
        os << trace_json(trace, ps).dump(2) << '\n';
    else
        write_trace_csv(os, trace);
    emit(a.out, os.str());
    return 0;
}

struct NttArgs {
    ParamArgs params;
    std::string in;
    std::string out;
    std::string format = "text";
    bool inverse = false;
    std::optional<std::uint64_t> omega;
};

int cmd_ntt(const NttArgs& a)
{
    const auto ps = a.params.resolve();
    const Format fmt = parse_format(a.format);
    if (fmt != Format::Text && fmt != Format::Json)
        throw Error(ErrorCode::InvalidConfig, "ntt supports --format text or json");
    const auto tw = make_twiddles(ps, a.omega);
    const Poly in = parse_poly(a.in.empty() || a.in == "-"
                                   ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                   : read_file(a.in));
    const auto res = a.inverse ? ntt_inverse(in, tw, ps, {}) : ntt_forward(in, tw, ps, {});
    if (res.fault)
        throw InvariantViolation("fault flag raised on a fault-free transform");
    emit(a.out, fmt == Format::Json ? poly_json(res.out) + "\n" : poly_text(res.out));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Montgomery reduction with recomputation-based fault detection: model, campaigns, checks"};
    app.set_config("--config", "", "TOML/INI file mirroring the flags; command-line flags take precedence");
    app.require_subcommand(1);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run the invariant suites; exit 1 on any failure");
    verify->add_option("--samples", va.samples, "random products per preset and word size")->capture_default_str();
    verify->add_option("--seed", va.seed)->capture_default_str();
    verify->add_option("--K", va.Ks, "offset multipliers to check")->delimiter(',');
    verify->add_option("--golden-hits", va.golden, "CSV: variant,calls,ram_hits,rom_hits");
    verify->add_option("--format", va.format, "text | json")->capture_default_str();
    verify->add_option("--out", va.out);

    auto* campaign = app.add_subcommand("campaign", "fault-injection campaigns");
    campaign->require_subcommand(1);
    CampaignArgs ra, ma;
    auto common = [](CLI::App* cmd, CampaignArgs& a) {
        cmd->add_option("--eta", a.etas, "flipped bits: list and/or ranges, e.g. 1,3,5 or 1-7")->delimiter(',');
        cmd->add_option("--target", a.targets, "fault targets")->delimiter(',');
        cmd->add_option("--mode", a.modes, "random,burst")->delimiter(',');
        cmd->add_option("--seed", a.seed, "master seed")->capture_default_str();
        cmd->add_option("--threads", a.threads, "worker threads (results do not depend on it)")
            ->capture_default_str();
        cmd->add_option("--format", a.format, "csv | json | md")->capture_default_str();
        cmd->add_option("--out", a.out, "export file; the markdown table then goes to stdout");
    };
    auto* remo_cmd = campaign->add_subcommand("remo", "operand faults against the shadow path");
    common(remo_cmd, ra);
    remo_cmd->add_option("--w", ra.ws, "word sizes")->delimiter(',');
    remo_cmd->add_option("--samples", ra.samples, "trials per cell")->capture_default_str();
    remo_cmd->add_option("--q", ra.q)->capture_default_str();
    remo_cmd->add_option("--l", ra.l)->capture_default_str();
    remo_cmd->add_option("--n", ra.n)->capture_default_str();
    remo_cmd->add_option("--K", ra.K)->capture_default_str();
    remo_cmd->add_option("--comparator", ra.comparator, "modq | bitwise | offset")->capture_default_str();
    remo_cmd->add_option("--path", ra.path, "main | shadow | both")->capture_default_str();

    auto* mem_cmd = campaign->add_subcommand("memory", "address faults against the rule checkers");
    common(mem_cmd, ma);
    mem_cmd->add_option("--variant", ma.variant, "kyber512 | kyber768 | kyber1024")->capture_default_str();
    mem_cmd->add_option("--runs", ma.runs, "protocol runs per cell")->capture_default_str();
    mem_cmd->add_option("--ik-rule", ma.ik_rule, "stage | literal")->capture_default_str();

    std::vector<std::string> hit_variants{"kyber512", "kyber768", "kyber1024"};
    std::string hits_format = "text", hits_out;
    auto* hits = app.add_subcommand("hits", "memory hit counts per protocol phase");
    hits->add_option("--variant", hit_variants)->delimiter(',');
    hits->add_option("--format", hits_format, "text | md | csv | json")->capture_default_str();
    hits->add_option("--out", hits_out);

    long long slices = 0, dsps = 0, brams = 0;
    auto* sec = app.add_subcommand("sec", "slice equivalent cost: slices + 100 dsps + 200 brams");
    sec->add_option("--slices", slices)->capture_default_str();
    sec->add_option("--dsps", dsps)->capture_default_str();
    sec->add_option("--brams", brams)->capture_default_str();

    TraceArgs ta;
    auto* trace = app.add_subcommand("trace", "dump the per-iteration record of one reduction");
    ta.params.attach(trace);
    trace->add_option("--alpha", ta.alpha)->capture_default_str();
    trace->add_option("--beta", ta.beta)->capture_default_str();
    trace->add_option("--K", ta.K)->capture_default_str();
    trace->add_option("--comparator", ta.comparator)->capture_default_str();
    trace->add_option("--path", ta.path, "path receiving the fault masks")->capture_default_str();
    trace->add_option("--fault-alpha", ta.fault_alpha, "XOR mask for alpha");
    trace->add_option("--fault-beta", ta.fault_beta, "XOR mask for beta");
    trace->add_option("--fault-from", ta.fault_from, "first corrupted iteration");
    trace->add_option("--format", ta.format, "csv | json")->capture_default_str();
    trace->add_option("--out,--dump-trace", ta.out, "output file");

    NttArgs na;
    auto* ntt = app.add_subcommand("ntt", "forward or inverse transform of a polynomial");
    na.params.attach(ntt);
    ntt->add_option("--in", na.in, "input: decimal residues one per line, or a JSON array (default stdin)");
    ntt->add_option("--out", na.out);
    ntt->add_option("--format", na.format, "text | json")->capture_default_str();
    ntt->add_flag("--inverse", na.inverse);
    ntt->add_option("--omega", na.omega, "primitive n-th root to use instead of the search result");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*verify)
            return cmd_verify(va);
        if (*remo_cmd)
            return cmd_campaign_remo(ra);
        if (*mem_cmd)
            return cmd_campaign_memory(ma);
        if (*hits)
            return cmd_hits(hit_variants, hits_format, hits_out);
        if (*sec) {
            if (slices < 0 || dsps < 0 || brams < 0)
                throw Error(ErrorCode::InvalidConfig, "counts must be non-negative");
            std::cout << slices + 100 * dsps + 200 * brams << '\n';
            return 0;
        }
        if (*trace)
            return cmd_trace(ta);
        if (*ntt)
            return cmd_ntt(na);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << '\n';
        return kExitInvariant;
    }
    return kExitConfig;
}
