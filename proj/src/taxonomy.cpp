// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/taxonomy.hpp"

#include <fstream>
#include <sstream>

#include "embedded_data.hpp"
#include "sensemarket/error.hpp"

namespace sensemarket {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_term_token(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_')) return false;
    return true;
}

} // namespace

PhenomenonTaxonomy PhenomenonTaxonomy::parse(std::string_view text) {
    PhenomenonTaxonomy taxonomy;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto where = " (line " + std::to_string(line_no) + ")";

        if (line.starts_with("group:")) {
            const auto eq = line.find('=');
            require(eq != std::string_view::npos, ErrorCode::InvalidArgument, "group line lacks '='" + where);
            const auto name = trim(line.substr(6, eq - 6));
            require(is_term_token(name), ErrorCode::InvalidArgument, "bad group name" + where);
            require(!taxonomy.groups_.contains(name), ErrorCode::InvalidArgument,
                    "duplicate group " + std::string(name) + where);
            std::set<std::string> members;
            std::string_view rest = line.substr(eq + 1);
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                const auto member = trim(rest.substr(0, comma));
                rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
                if (member.empty()) continue;
                require(is_term_token(member), ErrorCode::InvalidArgument, "bad group member" + where);
                members.emplace(member);
            }
            require(!members.empty(), ErrorCode::InvalidArgument, "group " + std::string(name) + " is empty" + where);
            taxonomy.groups_.emplace(std::string(name), std::move(members));
        } else {
            require(is_term_token(line), ErrorCode::InvalidArgument, "bad term '" + std::string(line) + "'" + where);
            taxonomy.terms_.emplace(line);
        }
    }
    for (const auto& [group, members] : taxonomy.groups_) {
        require(!taxonomy.terms_.contains(group), ErrorCode::InvalidArgument,
                "group " + group + " shadows a term of the same name");
        for (const auto& m : members)
            require(taxonomy.terms_.contains(m), ErrorCode::InvalidArgument,
                    "group " + group + " names unknown term " + m);
    }
    taxonomy.lookup_.insert(taxonomy.terms_.begin(), taxonomy.terms_.end());
    return taxonomy;
}

PhenomenonTaxonomy PhenomenonTaxonomy::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::NotFound, "cannot read taxonomy file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

std::string_view PhenomenonTaxonomy::builtin_text() noexcept { return embedded::kTaxonomy; }

const PhenomenonTaxonomy& PhenomenonTaxonomy::builtin() {
    static const PhenomenonTaxonomy taxonomy = parse(embedded::kTaxonomy);
    return taxonomy;
}

bool PhenomenonTaxonomy::has_term(std::string_view term) const { return lookup_.contains(term); }

bool PhenomenonTaxonomy::has_group(std::string_view group) const { return groups_.contains(group); }

std::set<std::string> PhenomenonTaxonomy::expand(std::string_view name) const {
    if (auto it = groups_.find(name); it != groups_.end()) return it->second;
    if (has_term(name)) return {std::string(name)};
    fail(ErrorCode::InvalidArgument, "unknown phenomenon or group: " + std::string(name));
}

} // namespace sensemarket
