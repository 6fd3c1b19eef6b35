#include "probekit/mac.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "probekit/errors.hpp"

namespace probekit {

bool MacAddress::is_broadcast() const {
    return octets == kBroadcastOctets;
}

MacAddress broadcast_mac() {
    return MacAddress{kBroadcastOctets};
}

std::string MacAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02X:%02X:%02X:%02X:%02X:%02X", octets[0], octets[1],
                  octets[2], octets[3], octets[4], octets[5]);
    return buf;
}

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
    if (text.size() != 17) return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    MacAddress mac;
    for (int i = 0; i < 6; ++i) {
        const int hi = nibble(text[i * 3]);
        const int lo = nibble(text[i * 3 + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        if (i < 5 && text[i * 3 + 2] != ':' && text[i * 3 + 2] != '-') return std::nullopt;
        mac.octets[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return mac;
}

MacClass classify_mac(const MacAddress& mac, const std::vector<PrefixRule>& rules) {
    MacClass cls;
    cls.locality = mac.is_local() ? Locality::Local : Locality::Global;
    cls.scope = mac.is_group() ? Scope::Group : Scope::Individual;
    for (const auto& rule : rules) {
        if (rule.matches(mac)) {
            cls.known_prefix = rule.name;
            break;
        }
    }
    return cls;
}

const std::vector<PrefixRule>& default_prefix_rules() {
    static const std::vector<PrefixRule> rules = {
        {"android-legacy", {0xDA, 0xA1, 0x19}},
        {"android-legacy-alt", {0xDA, 0x1A, 0x19}},
    };
    return rules;
}

std::vector<PrefixRule> parse_prefix_rules(std::string_view text) {
    std::vector<PrefixRule> rules;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string name, prefix_text;
        if (!(fields >> name)) continue;  // blank line
        if (!(fields >> prefix_text)) {
            throw ValidationError("prefix rule line " + std::to_string(lineno) +
                                  ": expected \"name prefix\"");
        }
        std::string extra;
        if (fields >> extra) {
            throw ValidationError("prefix rule line " + std::to_string(lineno) +
                                  ": trailing content \"" + extra + "\"");
        }
        // Accept a full address or just the first three octets.
        std::optional<MacAddress> parsed;
        if (prefix_text.size() == 8) {
            parsed = MacAddress::parse(prefix_text + ":00:00:00");
        } else {
            parsed = MacAddress::parse(prefix_text);
        }
        if (!parsed) {
            throw ValidationError("prefix rule line " + std::to_string(lineno) +
                                  ": bad prefix \"" + prefix_text + "\"");
        }
        PrefixRule rule;
        rule.name = name;
        rule.prefix = {parsed->octets[0], parsed->octets[1], parsed->octets[2]};
        if ((rule.prefix[0] & 0x02) == 0) {
            throw ValidationError("prefix rule line " + std::to_string(lineno) + ": prefix " +
                                  prefix_text + " lacks the locally-administered bit");
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<PrefixRule> load_prefix_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open prefix rule file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_prefix_rules(buf.str());
}

MacSplit mac_split(std::span<const MacAddress> sources, const std::vector<PrefixRule>& rules) {
    MacSplit split;
    split.prefix_counts.reserve(rules.size());
    for (const auto& rule : rules) split.prefix_counts.emplace_back(rule.name, 0);
    for (const auto& mac : sources) {
        ++split.total;
        if (mac.is_local()) {
            ++split.local;
        } else {
            ++split.global;
        }
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (rules[i].matches(mac)) ++split.prefix_counts[i].second;
        }
    }
    if (split.total > 0) {
        split.local_fraction = static_cast<double>(split.local) / static_cast<double>(split.total);
    }
    return split;
}

}  // namespace probekit
