// probekit: analyze 802.11 probe-request captures.
//
// Subcommands: stats, analyze, presence, anonymize, synth.
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "probekit/anonymize.hpp"
#include "probekit/dot11.hpp"
#include "probekit/errors.hpp"
#include "probekit/hash.hpp"
#include "probekit/pcap.hpp"
#include "probekit/presence.hpp"
#include "probekit/report.hpp"
#include "probekit/session.hpp"
#include "probekit/synthgen.hpp"

namespace {

using namespace probekit;

struct CommonOptions {
    std::vector<std::string> inputs;
    std::string prefixes_file;
    std::string out_dir;
    bool json = false;
    int tz_offset_minutes = 0;
};

struct ClusterOptions {
    double burst_gap = ClusterParams{}.burst_gap;
    double pnl_threshold = ClusterParams{}.pnl_threshold;
    int recurrence = ClusterParams{}.recurrence_threshold;
};

ClusterParams to_params(const ClusterOptions& opts) {
    ClusterParams params;
    params.burst_gap = opts.burst_gap;
    params.pnl_threshold = opts.pnl_threshold;
    params.recurrence_threshold = opts.recurrence;
    params.validate();
    return params;
}

std::vector<PrefixRule> resolve_rules(const CommonOptions& opts) {
    if (opts.prefixes_file.empty()) return default_prefix_rules();
    return load_prefix_rules(opts.prefixes_file);
}

// Inputs are processed in lexicographic order and treated as one capture, in
// line with how rotated files continue each other.
std::vector<ProbeRequest> load_probes(const CommonOptions& opts) {
    std::vector<std::string> inputs = opts.inputs;
    std::sort(inputs.begin(), inputs.end());

    std::vector<ProbeRequest> probes;
    std::size_t failed = 0;
    for (const auto& input : inputs) {
        try {
            PcapReader reader(input);
            while (auto record = reader.next()) {
                std::span<const std::uint8_t> frame;
                try {
                    frame = strip_radiotap(*record, reader.meta());
                } catch (const MalformedFrameError&) {
                    continue;
                }
                try {
                    if (auto probe = parse_probe_request(frame, record->ts)) {
                        probes.push_back(std::move(*probe));
                    }
                } catch (const MalformedFrameError&) {
                }
            }
            if (reader.truncated()) {
                std::cerr << "warning: " << input << ": truncated after "
                          << reader.records_read() << " records, continuing\n";
            }
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            ++failed;
        }
    }
    if (!inputs.empty() && failed == inputs.size()) {
        throw IoError("no input could be read");
    }
    return probes;
}

void emit(const CommonOptions& opts, const std::string& name, const std::string& content) {
    if (opts.out_dir.empty()) {
        std::cout << content;
        return;
    }
    std::filesystem::create_directories(opts.out_dir);
    const std::string extension = opts.json ? ".json" : ".csv";
    write_file_atomic(std::filesystem::path(opts.out_dir) / (name + extension), content);
}

ReportOptions report_options(const CommonOptions& opts) {
    ReportOptions report;
    report.json = opts.json;
    report.tz_offset_minutes = opts.tz_offset_minutes;
    return report;
}

int run_stats(const CommonOptions& opts) {
    const auto rules = resolve_rules(opts);
    const auto probes = load_probes(opts);
    const IeInventory inv = inventory(probes);
    const MacSplit split = mac_split(std::span<const ProbeRequest>{probes}, rules);
    const auto report = report_options(opts);

    if (opts.out_dir.empty() && opts.json) {
        nlohmann::ordered_json combined;
        combined["inventory"] = nlohmann::ordered_json::parse(render_inventory(inv, report));
        combined["mac_split"] = nlohmann::ordered_json::parse(render_mac_split(split, report));
        std::cout << combined.dump(2) << "\n";
        return 0;
    }
    emit(opts, "inventory", render_inventory(inv, report));
    if (opts.out_dir.empty() && !opts.json) std::cout << "\n";
    emit(opts, "mac_split", render_mac_split(split, report));
    return 0;
}

int run_analyze(const CommonOptions& opts, const ClusterOptions& cluster_opts) {
    const auto params = to_params(cluster_opts);
    const auto rules = resolve_rules(opts);
    const auto probes = load_probes(opts);

    const auto instances = detect_bursts(probes, params);
    const auto devices = cluster_devices(instances, params, rules);
    const auto partition = recurrence_report(devices, params);
    const auto stats = summary_stats(probes, instances, devices, params, rules);
    const auto report = report_options(opts);

    if (!opts.out_dir.empty()) {
        emit(opts, "instances", render_instances(instances, devices, report));
        emit(opts, "devices", render_devices(devices, report));
        emit(opts, "recurrence", render_recurrence(devices, partition, report));
        emit(opts, "timeline", render_timeline(devices, instances, report));
        emit(opts, "summary", render_summary(stats, report, true));
    }
    std::cout << render_summary(stats, report, true);
    return 0;
}

int run_presence(const CommonOptions& opts, const ClusterOptions& cluster_opts, int bin_minutes,
                 const std::string& annotations_file, bool with_devices) {
    if (bin_minutes <= 0) {
        throw ValidationError("--bin-minutes must be positive");
    }
    const auto probes = load_probes(opts);
    std::vector<ScheduleAnnotation> annotations;
    if (!annotations_file.empty()) {
        annotations = load_annotations(annotations_file);
    }

    std::vector<PresenceBin> bins;
    if (with_devices) {
        const auto params = to_params(cluster_opts);
        const auto rules = resolve_rules(opts);
        const auto instances = detect_bursts(probes, params);
        const auto devices = cluster_devices(instances, params, rules);
        bins = bin_presence(probes, bin_minutes, instances, devices);
    } else {
        bins = bin_presence(probes, bin_minutes);
    }
    emit(opts, "presence", render_presence(bins, annotations, report_options(opts)));
    return 0;
}

int run_anonymize(const std::string& input, const std::string& output,
                  const std::string& salt_hex, std::uint64_t seed, bool seed_given,
                  const AnonymizationPolicy& policy_flags) {
    AnonymizationPolicy policy = policy_flags;
    if (!salt_hex.empty()) {
        policy.salt = from_hex(salt_hex);
    } else if (seed_given) {
        std::vector<std::uint8_t> seed_bytes(8);
        for (int i = 0; i < 8; ++i) {
            seed_bytes[static_cast<std::size_t>(i)] =
                static_cast<std::uint8_t>(seed >> (8 * i));
        }
        const auto digest = sha512(seed_bytes);
        policy.salt.assign(digest.begin(), digest.begin() + 16);
    } else {
        std::random_device rd;
        policy.salt.resize(16);
        for (auto& b : policy.salt) b = static_cast<std::uint8_t>(rd());
    }

    const AnonymizationReport report = anonymize_capture(input, output, policy);
    for (const auto& warning : report.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    std::cout << "records," << report.records << "\n"
              << "probes," << report.probes << "\n"
              << "macs_rewritten," << report.macs_rewritten << "\n"
              << "ssids_rewritten," << report.ssids_rewritten << "\n"
              << "uuids_rewritten," << report.uuids_rewritten << "\n";
    return 0;
}

int run_synth(const std::string& config, std::uint64_t seed, const std::string& out_pcap,
              const std::string& truth_csv) {
    const Population population = load_population(config);
    const SynthOutput output = generate(population.devices, seed, population.start_epoch);
    const std::filesystem::path tmp = out_pcap + ".tmp";
    write_capture(tmp, output.capture.meta, output.capture.records);
    std::filesystem::rename(tmp, out_pcap);
    if (!truth_csv.empty()) {
        write_ground_truth_csv(truth_csv, output.truth);
    }
    std::cout << "records," << output.capture.records.size() << "\n"
              << "instances," << output.truth.expected_instances << "\n"
              << "devices," << output.truth.expected_devices << "\n";
    return 0;
}

void add_common(CLI::App* sub, CommonOptions& opts, bool inputs_required = true) {
    auto* inputs = sub->add_option("inputs", opts.inputs, "pcap capture files");
    if (inputs_required) inputs->required();
    sub->add_option("--prefixes", opts.prefixes_file,
                    "prefix rule file (one \"name prefix\" per line)");
    sub->add_option("--out", opts.out_dir, "write reports into this directory");
    sub->add_flag("--json", opts.json, "emit JSON instead of CSV");
    sub->add_option("--tz-offset", opts.tz_offset_minutes,
                    "display offset in minutes applied to rendered times");
}

void add_cluster(CLI::App* sub, ClusterOptions& opts) {
    sub->add_option("--burst-gap", opts.burst_gap,
                    "max seconds between probes of one scan burst");
    sub->add_option("--pnl-threshold", opts.pnl_threshold,
                    "min preferred-network-list similarity for a device link");
    sub->add_option("--recurrence", opts.recurrence,
                    "appearances above which a device counts as recurrent");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"802.11 probe-request capture analysis"};
    app.require_subcommand(1);

    CommonOptions stats_opts;
    auto* stats_cmd = app.add_subcommand("stats", "information-element inventory and MAC split");
    add_common(stats_cmd, stats_opts);

    CommonOptions analyze_opts;
    ClusterOptions analyze_cluster;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "scan instances, device clusters, recurrence");
    add_common(analyze_cmd, analyze_opts);
    add_cluster(analyze_cmd, analyze_cluster);

    CommonOptions presence_opts;
    ClusterOptions presence_cluster;
    int bin_minutes = 15;
    std::string annotations_file;
    bool with_devices = false;
    auto* presence_cmd = app.add_subcommand("presence", "time-binned probe density");
    add_common(presence_cmd, presence_opts);
    add_cluster(presence_cmd, presence_cluster);
    presence_cmd->add_option("--bin-minutes", bin_minutes, "bin width in minutes");
    presence_cmd->add_option("--annotations", annotations_file,
                             "schedule file: \"start end label\" per line");
    presence_cmd->add_flag("--cluster", with_devices,
                           "also count distinct devices per bin (runs clustering)");

    std::string anon_input, anon_output, salt_hex;
    std::uint64_t anon_seed = 0;
    AnonymizationPolicy policy_flags;
    auto* anon_cmd = app.add_subcommand("anonymize", "hash identifying fields into a new pcap");
    anon_cmd->add_option("input", anon_input, "source pcap")->required();
    anon_cmd->add_option("output", anon_output, "destination pcap")->required();
    anon_cmd->add_option("--salt", salt_hex, "hex salt (default: random per run)");
    auto* anon_seed_opt =
        anon_cmd->add_option("--seed", anon_seed, "derive the salt from this seed");
    anon_cmd->add_flag("!--no-hash-mac", policy_flags.hash_mac, "leave addresses untouched");
    anon_cmd->add_flag("!--no-hash-ssid", policy_flags.hash_ssid, "leave SSIDs untouched");
    anon_cmd->add_flag("!--no-hash-uuid", policy_flags.hash_uuid_e, "leave UUID-E untouched");
    anon_cmd->add_flag("!--no-preserve-locality", policy_flags.preserve_locality_bits,
                       "hash the functional bits too");

    std::string synth_config, synth_out, synth_truth;
    std::uint64_t synth_seed = 0;
    auto* synth_cmd =
        app.add_subcommand("synth", "generate a labeled capture from a population config");
    synth_cmd->add_option("--config", synth_config, "population JSON")->required();
    synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--out", synth_out, "output pcap")->required();
    synth_cmd->add_option("--truth", synth_truth, "ground-truth CSV (probe_index,device_label)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (stats_cmd->parsed()) return run_stats(stats_opts);
        if (analyze_cmd->parsed()) return run_analyze(analyze_opts, analyze_cluster);
        if (presence_cmd->parsed()) {
            return run_presence(presence_opts, presence_cluster, bin_minutes, annotations_file,
                                with_devices);
        }
        if (anon_cmd->parsed()) {
            return run_anonymize(anon_input, anon_output, salt_hex, anon_seed,
                                 anon_seed_opt->count() > 0, policy_flags);
        }
        if (synth_cmd->parsed()) {
            return run_synth(synth_config, synth_seed, synth_out, synth_truth);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
