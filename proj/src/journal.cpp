// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/journal.hpp"

#include "sensemarket/error.hpp"

namespace sensemarket {

JsonLinesLog::JsonLinesLog(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    // Drop a torn tail left by a crash so the next record starts on its own line.
    if (std::filesystem::exists(path_)) {
        std::ifstream in(path_, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (!content.empty() && content.back() != '\n') {
            const auto last_nl = content.rfind('\n');
            std::filesystem::resize_file(path_, last_nl == std::string::npos ? 0 : last_nl + 1);
        }
    }
    out_.open(path_, std::ios::app | std::ios::binary);
    require(out_.good(), ErrorCode::Internal, "cannot open " + path_.string() + " for appending");
}

void JsonLinesLog::append(const nlohmann::json& record) {
    out_ << record.dump() << '\n';
    out_.flush();
    require(out_.good(), ErrorCode::Internal, "write to " + path_.string() + " failed");
}

std::vector<nlohmann::json> JsonLinesLog::read_all(const std::filesystem::path& path) {
    std::vector<nlohmann::json> records;
    std::ifstream in(path, std::ios::binary);
    if (!in) return records;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        ++line_no;
        if (nl == std::string::npos) break; // torn tail
        const std::string_view line(content.data() + pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        try {
            records.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception&) {
            if (pos >= content.size()) break;
            fail(ErrorCode::Internal, path.string() + ":" + std::to_string(line_no) + " is corrupt");
        }
    }
    return records;
}

void Inbox::post(const std::string& recipient, std::string kind, Timestamp at, nlohmann::json payload) {
    {
        std::lock_guard lock(mutex_);
        boxes_[recipient].push_back(Notification{next_seq_++, recipient, std::move(kind), at, std::move(payload)});
    }
    changed_.notify_all();
}

std::vector<Notification> Inbox::list(const std::string& recipient, std::uint64_t after_seq) const {
    std::lock_guard lock(mutex_);
    std::vector<Notification> out;
    if (auto it = boxes_.find(recipient); it != boxes_.end())
        for (const auto& n : it->second)
            if (n.seq > after_seq) out.push_back(n);
    return out;
}

std::vector<Notification> Inbox::wait(const std::string& recipient, std::uint64_t after_seq,
                                      std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    auto has_new = [&] {
        auto it = boxes_.find(recipient);
        return it != boxes_.end() && !it->second.empty() && it->second.back().seq > after_seq;
    };
    changed_.wait_for(lock, timeout, has_new);
    lock.unlock();
    return list(recipient, after_seq);
}

} // namespace sensemarket
