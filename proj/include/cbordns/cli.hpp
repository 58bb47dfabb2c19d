#pragma once

// Batch front-end. run() holds the whole command line so tests can drive it
// with in-memory streams; tools/cbordns.cpp only forwards main's arguments.

#include <cbordns/analysis.hpp>
#include <cbordns/cbor.hpp>
#include <cbordns/dns_cbor.hpp>
#include <cbordns/dns_packed.hpp>
#include <cbordns/dns_wire.hpp>
#include <cbordns/json_bridge.hpp>
#include <cbordns/metrics.hpp>

#include <CLI11.hpp> // vendored

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cbordns::cli {

enum exit_code : int { ok = 0, input_error = 1, usage_error = 2 };

struct streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

namespace detail {

// Thrown for option combinations CLI11 cannot express.
struct usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_all(const std::string& path, std::istream& in)
{
    std::ostringstream ss;
    if (path == "-") {
        ss << in.rdbuf();
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw io_failure("cannot open " + path);
    ss << f.rdbuf();
    return ss.str();
}

inline bytes as_bytes(const std::string& s) { return bytes(s.begin(), s.end()); }

inline void write_all(const std::string& path, std::ostream& out, std::string_view data)
{
    if (path == "-") {
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw io_failure("cannot write " + path);
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
}

inline void write_bytes(const std::string& path, std::ostream& out, const bytes& data, bool hex)
{
    if (hex)
        write_all(path, out, to_hex(data) + "\n");
    else
        write_all(path, out, std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

inline bytes input_bytes(const std::string& path, std::istream& in, bool hex)
{
    auto raw = read_all(path, in);
    return hex ? from_hex(raw) : as_bytes(raw);
}

inline const std::map<std::string, cbor::float_mode> float_modes = {
    {"preserve", cbor::float_mode::preserve},
    {"force_double", cbor::float_mode::force_double},
    {"smallest", cbor::float_mode::smallest},
};

inline const std::map<std::string, analysis::mode> dns_modes = {
    {"none", analysis::mode::unpacked},
    {"compref10", analysis::mode::compref10},
    {"compref11", analysis::mode::compref11},
    {"packedlite", analysis::mode::packed_lite},
    {"packedfull", analysis::mode::packed_full},
};

inline void report_losses(std::ostream& err, const json::conversion_report& r)
{
    if (r.lossless())
        return;
    err << "note: conversion is lossy:";
    if (r.lossy_numbers)
        err << " lossy_numbers=" << r.lossy_numbers;
    if (r.duplicate_keys)
        err << " duplicate_keys=" << r.duplicate_keys;
    if (r.unwrapped_tags)
        err << " unwrapped_tags=" << r.unwrapped_tags;
    if (r.undefined_values)
        err << " undefined_values=" << r.undefined_values;
    if (r.non_text_keys)
        err << " non_text_keys=" << r.non_text_keys;
    if (r.non_finite_floats)
        err << " non_finite_floats=" << r.non_finite_floats;
    err << '\n';
}

inline bool is_pcap(const bytes& b)
{
    if (b.size() < 4)
        return false;
    std::uint32_t m = b[0] | b[1] << 8 | b[2] << 16 | static_cast<std::uint32_t>(b[3]) << 24;
    return m == 0xa1b2c3d4 || m == 0xd4c3b2a1 || m == 0xa1b23c4d || m == 0x4d3cb2a1;
}

// Hex corpus or pcap, by magic number.
inline std::vector<analysis::stream_message> load_corpus(const bytes& raw, std::ostream& err, std::size_t& failures)
{
    if (is_pcap(raw)) {
        auto p = analysis::ingest_pcap(raw);
        err << "pcap: " << p.packets << " packets, " << p.messages.size() << " DNS messages, " << p.non_dns
            << " non-DNS, " << p.undecodable << " undecodable, " << p.fragments << " fragments, "
            << p.ipv6_extension_headers << " IPv6 extension headers skipped\n";
        failures += p.undecodable;
        return std::move(p.messages);
    }
    auto h = analysis::ingest_hex(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
    for (const auto& e : h.errors)
        err << "line " << e.origin << ": " << e.detail << '\n';
    failures += h.errors.size();
    return std::move(h.messages);
}

struct dns_flags {
    std::string role;
    std::string mode = "none";
    std::string request;
    bool query_answers = false;
    bool hex = false;
};

inline dns::codec_context make_context(const dns_flags& f, const dns::message* msg, std::istream& in)
{
    dns::codec_context ctx;
    if (f.role == "q")
        ctx.role = dns::role::query;
    else if (f.role == "r")
        ctx.role = dns::role::response;
    else if (msg)
        ctx.role = msg->is_response() ? dns::role::response : dns::role::query;
    else
        throw usage("--role is required when decoding");
    if (f.query_answers && ctx.role == dns::role::response)
        throw usage("--query-answers only applies to queries");
    if (!f.request.empty()) {
        if (ctx.role == dns::role::query)
            throw usage("--request only applies to responses");
        auto req = dns::decode_wire(input_bytes(f.request, in, f.hex));
        if (req.questions.size() != 1)
            throw codec_error(errc::multi_question, "request must carry one question");
        ctx.request_question = req.questions.front();
    }
    ctx.allow_query_answers = f.query_answers;
    auto m = dns_modes.at(f.mode);
    if (m == analysis::mode::compref10)
        ctx.mode = dns::compression_mode::compref10();
    else if (m == analysis::mode::compref11)
        ctx.mode = dns::compression_mode::compref11();
    return ctx;
}

struct timing {
    double mean_us = 0;
    double stddev_us = 0;
};

template <typename F>
timing measure(std::size_t iterations, F&& f)
{
    std::vector<double> samples;
    samples.reserve(iterations);
    for (std::size_t i = 0; i < iterations; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    }
    timing t;
    for (double s : samples)
        t.mean_us += s;
    t.mean_us /= static_cast<double>(samples.size());
    for (double s : samples)
        t.stddev_us += (s - t.mean_us) * (s - t.mean_us);
    t.stddev_us = samples.size() > 1 ? std::sqrt(t.stddev_us / static_cast<double>(samples.size() - 1)) : 0.0;
    return t;
}

inline void print_timing(std::ostream& out, std::string_view target, std::string_view op, std::size_t n, timing t)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %-7s %10.3f us +- %8.3f us  (n=%zu)\n", std::string(target).c_str(),
        std::string(op).c_str(), t.mean_us, t.stddev_us, n);
    out << buf;
}

inline dns::message sample_message()
{
    dns::message m;
    m.flags = 0x8180;
    m.questions.push_back({dns::name::from_text("www.example.org"), dns::rr_type::a, dns::class_in});
    m.answers.push_back({dns::name::from_text("www.example.org"), dns::rr_type::cname, dns::class_in, 3218,
        dns::serialize_name_rdata(dns::name::from_text("example.org"))});
    m.additional.push_back(
        {dns::name::from_text("example.org"), dns::rr_type::a, dns::class_in, 3218, {0xc6, 0x33, 0x64, 0x23}});
    return m;
}

inline constexpr std::string_view sample_json
    = R"({"sha":"3d21ec53a331a6f037a91c368710b99387d012c1","size":5.5,"tags":["a","b"],"nested":{"ok":true,"n":null}})";

} // namespace detail

/// Runs the command line `args` (without the program name).
inline int run(const std::vector<std::string>& args, streams io)
{
    using namespace detail;
    CLI::App app{"CBOR, dns+cbor and classic DNS codec toolkit", "cbordns"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    std::string in = "-", out = "-";
    bool hex_in = false, hex_out = false, strict = false;
    std::string float_mode = "smallest";
    unsigned parallel = 1;
    dns_flags df;
    std::string step;
    std::string bench_target;
    std::size_t iterations = 100;

    auto add_io = [&](CLI::App* c) {
        c->add_option("-i,--in", in, "Input file, - for stdin")->capture_default_str();
        c->add_option("-o,--out", out, "Output file, - for stdout")->capture_default_str();
    };
    std::string encode_floats = "preserve";
    auto float_option = [&](CLI::App* c, std::string& target) {
        c->add_option("--float-mode", target, "preserve | force_double | smallest")
            ->check(CLI::IsMember({"preserve", "force_double", "smallest"}))
            ->capture_default_str();
    };
    auto dns_options = [&](CLI::App* c) {
        c->add_option("--role", df.role, "q or r; defaults to the QR bit when encoding")
            ->check(CLI::IsMember({"q", "r"}));
        c->add_option("--mode", df.mode, "none | compref10 | compref11 | packedlite | packedfull")
            ->check(CLI::IsMember({"none", "compref10", "compref11", "packedlite", "packedfull"}))
            ->capture_default_str();
        c->add_option("--request", df.request, "Wire-format query whose question the response may elide");
        c->add_flag("--query-answers", df.query_answers, "Carry the answer section in queries");
        c->add_flag("--hex", df.hex, "Wire messages are hex text instead of binary");
    };

    auto* cbor_cmd = app.add_subcommand("cbor", "Raw CBOR tools")->require_subcommand(1);
    auto* cbor_encode = cbor_cmd->add_subcommand("encode", "Re-encode CBOR with definite lengths and shortest heads");
    auto* cbor_decode = cbor_cmd->add_subcommand("decode", "List the items of a CBOR sequence");
    auto* cbor_diag = cbor_cmd->add_subcommand("diag", "Print diagnostic notation");
    for (auto* c : {cbor_encode, cbor_decode, cbor_diag}) {
        add_io(c);
        c->add_flag("--hex-in", hex_in, "Input is hex text");
    }
    cbor_encode->add_flag("--hex-out", hex_out, "Write hex text");
    float_option(cbor_encode, encode_floats);

    auto* json_cmd = app.add_subcommand("json", "JSON <-> CBOR")->require_subcommand(1);
    auto* json_to = json_cmd->add_subcommand("to-cbor", "Convert JSON to CBOR");
    auto* json_from = json_cmd->add_subcommand("from-cbor", "Convert CBOR to minified JSON");
    auto* json_min = json_cmd->add_subcommand("minify", "Minify JSON");
    auto* json_blob = json_cmd->add_subcommand("blob-transform", "Apply one GitHub blob transform");
    auto* json_analyze = json_cmd->add_subcommand("analyze", "Taxonomy and savings CSV for JSON files");
    for (auto* c : {json_to, json_from, json_min, json_blob, json_analyze})
        add_io(c);
    for (auto* c : {json_to, json_blob})
        c->add_flag("--hex-out", hex_out, "Write hex text");
    json_from->add_flag("--hex-in", hex_in, "Input is hex text");
    float_option(json_to, float_mode);
    json_blob->add_option("--step", step, "tag34 | bstr | embed")
        ->required()
        ->check(CLI::IsMember({"tag34", "bstr", "embed"}));
    json_blob->add_flag("--hex-in", hex_in, "CBOR input is hex text");
    float_option(json_analyze, float_mode);
    json_analyze->add_flag("--strict", strict, "Exit 1 if any file fails");

    auto* dns_cmd = app.add_subcommand("dns", "dns+cbor and classic DNS")->require_subcommand(1);
    auto* dns_to = dns_cmd->add_subcommand("to-cbor", "Wire-format message to dns+cbor");
    auto* dns_from = dns_cmd->add_subcommand("from-cbor", "dns+cbor to wire-format message");
    auto* dns_compare = dns_cmd->add_subcommand("compare", "Mode comparison CSV over a hex or pcap corpus");
    auto* dns_suffix = dns_cmd->add_subcommand("suffix-stats", "Pairwise suffix / prefix CSV over a corpus");
    for (auto* c : {dns_to, dns_from, dns_compare, dns_suffix})
        add_io(c);
    for (auto* c : {dns_to, dns_from})
        dns_options(c);
    dns_to->add_flag("--hex-out", hex_out, "Write hex text");
    dns_from->add_flag("--hex-out", hex_out, "Write hex text");
    dns_from->add_flag("--hex-in", hex_in, "CBOR input is hex text");
    dns_compare->add_flag("--query-answers", df.query_answers, "Carry the answer section in queries");
    for (auto* c : {dns_compare, dns_suffix}) {
        c->add_option("--parallel", parallel, "Worker threads")->check(CLI::Range(1u, 256u));
        c->add_flag("--strict", strict, "Exit 1 if any message fails");
    }

    auto* pcap_cmd = app.add_subcommand("pcap", "Capture tools")->require_subcommand(1);
    auto* pcap_extract = pcap_cmd->add_subcommand("extract", "Write the DNS messages of a pcap as hex lines");
    add_io(pcap_extract);

    auto* bench = app.add_subcommand("bench", "Time encode/decode (reports only)");
    bench->add_option("--target", bench_target, "json | cbor | dnswire | dnscbor")
        ->required()
        ->check(CLI::IsMember({"json", "cbor", "dnswire", "dnscbor"}));
    bench->add_option("--iterations", iterations, "Runs per operation")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("-i,--in", in, "Sample input (JSON text or wire message); built-in sample if omitted");
    bench->add_option("--mode", df.mode, "dns+cbor mode for dnscbor")
        ->check(CLI::IsMember({"none", "compref10", "compref11", "packedlite", "packedfull"}));
    bench->add_flag("--hex", df.hex, "Wire sample is hex text");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, io.out, io.err);
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, io.out, io.err);
        return ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, io.out, io.err);
        return usage_error;
    }

    const auto floats = float_modes.at(float_mode);
    try {
        // ---- cbor ----
        if (cbor_encode->parsed()) {
            auto item = cbor::decode_all(input_bytes(in, io.in, hex_in));
            write_bytes(out, io.out, cbor::encode(item, {.floats = float_modes.at(encode_floats)}), hex_out);
        } else if (cbor_decode->parsed()) {
            auto data = input_bytes(in, io.in, hex_in);
            std::string text;
            for (std::size_t pos = 0; pos < data.size();) {
                auto r = cbor::decode(std::span(data).subspan(pos));
                text += std::to_string(pos) + ' ' + std::to_string(r.consumed) + ' ' + cbor::to_diagnostic(r.value)
                    + '\n';
                pos += r.consumed;
            }
            write_all(out, io.out, text);
        } else if (cbor_diag->parsed()) {
            write_all(out, io.out, cbor::to_diagnostic(cbor::decode_all(input_bytes(in, io.in, hex_in))) + "\n");
        }
        // ---- json ----
        else if (json_to->parsed()) {
            json::conversion_report rep;
            auto item = json::json_to_cbor(json::parse_json(read_all(in, io.in)), floats, &rep);
            report_losses(io.err, rep);
            write_bytes(out, io.out, cbor::encode(item, {.floats = floats}), hex_out);
        } else if (json_from->parsed()) {
            json::conversion_report rep;
            auto v = json::cbor_to_json(cbor::decode_all(input_bytes(in, io.in, hex_in)), &rep);
            report_losses(io.err, rep);
            write_all(out, io.out, json::minify(v) + "\n");
        } else if (json_min->parsed()) {
            write_all(out, io.out, json::minify(json::parse_json(read_all(in, io.in))) + "\n");
        } else if (json_blob->parsed()) {
            // JSON blobs straight from the API, or CBOR output of an earlier step
            auto raw = read_all(in, io.in);
            cbor::item blob;
            try {
                blob = json::json_to_cbor(json::parse_json(raw), cbor::float_mode::smallest);
            } catch (const codec_error& e) {
                if (e.code() != errc::syntax_error)
                    throw;
                blob = cbor::decode_all(hex_in ? from_hex(raw) : as_bytes(raw));
            }
            cbor::item result = step == "tag34" ? json::blob_tag_base64(blob)
                : step == "bstr"                ? json::blob_to_bstr(blob)
                                                : json::blob_embed_cbor(blob);
            write_bytes(out, io.out, cbor::encode(result), hex_out);
        } else if (json_analyze->parsed()) {
            namespace fs = std::filesystem;
            std::vector<fs::path> files;
            if (in != "-" && fs::is_directory(in)) {
                for (const auto& e : fs::directory_iterator(in))
                    if (e.is_regular_file() && e.path().extension() == ".json")
                        files.push_back(e.path());
                std::sort(files.begin(), files.end());
            } else {
                files.emplace_back(in);
            }
            std::vector<analysis::json_row> rows;
            std::size_t failed = 0;
            for (const auto& f : files) {
                try {
                    auto name = f == "-" ? std::string("-") : f.filename().string();
                    rows.push_back(analysis::analyze_json(name, read_all(f.string(), io.in), floats));
                } catch (const codec_error& e) {
                    io.err << f.string() << ": " << e.what() << '\n';
                    ++failed;
                }
            }
            write_all(out, io.out, analysis::write_json_csv(rows));
            if (failed) {
                io.err << failed << " of " << files.size() << " files failed\n";
                if (strict)
                    return input_error;
            }
        }
        // ---- dns ----
        else if (dns_to->parsed()) {
            auto msg = dns::decode_wire(input_bytes(in, io.in, df.hex));
            auto ctx = make_context(df, &msg, io.in);
            dns::encode_report rep;
            auto enc = analysis::encode_mode(msg, ctx, dns_modes.at(df.mode), {}, &rep);
            if (rep.dropped_query_answers)
                io.err << "note: " << msg.answers.size() << " query answers dropped (use --query-answers)\n";
            write_bytes(out, io.out, enc, hex_out);
        } else if (dns_from->parsed()) {
            auto data = input_bytes(in, io.in, hex_in);
            auto ctx = make_context(df, nullptr, io.in);
            auto msg = analysis::decode_mode(data, ctx, dns_modes.at(df.mode));
            write_bytes(out, io.out, dns::encode_wire(msg), hex_out);
        } else if (dns_compare->parsed()) {
            std::size_t failures = 0;
            auto stream = load_corpus(as_bytes(read_all(in, io.in)), io.err, failures);
            analysis::compare_options opts;
            opts.allow_query_answers = df.query_answers;
            auto report = analysis::compare_corpus(stream, opts, parallel);
            for (const auto& e : report.errors)
                io.err << "message " << e.origin << ": " << e.detail << '\n';
            failures += report.errors.size();
            std::vector<analysis::mode_comparison> rows;
            for (auto& r : report.rows)
                rows.push_back(r.comparison);
            write_all(out, io.out, analysis::write_csv(rows));
            if (failures) {
                io.err << failures << " messages skipped\n";
                if (strict)
                    return input_error;
            }
        } else if (dns_suffix->parsed()) {
            std::size_t failures = 0;
            auto stream = load_corpus(as_bytes(read_all(in, io.in)), io.err, failures);
            std::vector<std::pair<std::size_t, analysis::suffix_stats>> per(stream.size());
            analysis::parallel_for(stream.size(), parallel, [&](std::size_t i) {
                per[i] = {stream[i].origin, analysis::message_pair_stats(stream[i].msg)};
            });
            write_all(out, io.out, analysis::write_suffix_csv(per));
            if (failures && strict)
                return input_error;
        }
        // ---- pcap ----
        else if (pcap_extract->parsed()) {
            auto p = analysis::ingest_pcap(as_bytes(read_all(in, io.in)));
            std::string text;
            for (const auto& m : p.messages) {
                text += "# packet " + std::to_string(m.origin)
                    + (m.role == dns::role::query ? " query\n" : " response\n");
                text += to_hex(dns::encode_wire(m.msg)) + '\n';
            }
            write_all(out, io.out, text);
            io.err << p.messages.size() << " DNS messages from " << p.packets << " packets\n";
        }
        // ---- bench ----
        else if (bench->parsed()) {
            if (bench_target == "json" || bench_target == "cbor") {
                std::string text = in == "-" ? std::string(sample_json) : read_all(in, io.in);
                auto v = json::parse_json(text);
                if (bench_target == "json") {
                    print_timing(io.out, "json", "decode", iterations, measure(iterations, [&] {
                        auto p = json::parse_json(text);
                        (void)p;
                    }));
                    print_timing(io.out, "json", "encode", iterations, measure(iterations, [&] {
                        auto s = json::minify(v);
                        (void)s;
                    }));
                } else {
                    auto item = json::json_to_cbor(v, cbor::float_mode::smallest);
                    auto enc = cbor::encode(item);
                    print_timing(io.out, "cbor", "decode", iterations, measure(iterations, [&] {
                        auto d = cbor::decode_all(enc);
                        (void)d;
                    }));
                    print_timing(io.out, "cbor", "encode", iterations, measure(iterations, [&] {
                        auto e = cbor::encode(item);
                        (void)e;
                    }));
                }
            } else {
                auto msg = in == "-" ? sample_message() : dns::decode_wire(input_bytes(in, io.in, df.hex));
                auto wire = dns::encode_wire(msg);
                if (bench_target == "dnswire") {
                    print_timing(io.out, "dnswire", "decode", iterations, measure(iterations, [&] {
                        auto d = dns::decode_wire(wire);
                        (void)d;
                    }));
                    print_timing(io.out, "dnswire", "encode", iterations, measure(iterations, [&] {
                        auto e = dns::encode_wire(msg);
                        (void)e;
                    }));
                } else {
                    auto m = dns_modes.at(df.mode);
                    auto ctx = analysis::context_for(msg, nullptr, m);
                    auto enc = analysis::encode_mode(msg, ctx, m);
                    print_timing(io.out, "dnscbor", "decode", iterations, measure(iterations, [&] {
                        auto d = analysis::decode_mode(enc, ctx, m);
                        (void)d;
                    }));
                    print_timing(io.out, "dnscbor", "encode", iterations, measure(iterations, [&] {
                        auto e = analysis::encode_mode(msg, ctx, m);
                        (void)e;
                    }));
                }
            }
        }
    } catch (const usage& e) {
        io.err << "usage error: " << e.what() << '\n';
        return usage_error;
    } catch (const codec_error& e) {
        io.err << "error: " << e.what() << '\n';
        return input_error;
    } catch (const io_failure& e) {
        io.err << "error: " << e.what() << '\n';
        return input_error;
    }
    return ok;
}

inline int run(int argc, const char* const* argv, streams io)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, io);
}

} // namespace cbordns::cli
