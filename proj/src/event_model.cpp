#include "aprifire/event_model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>

namespace aprifire {

namespace {

constexpr std::array<std::string_view, kAttributeKindCount> kKindNames = {
    "src_ip", "dst_ip", "src_port", "dst_port", "protocol", "label",
};

bool parse_port(std::string_view text, std::uint32_t& out) {
    if (text.empty() || text.size() > 5) return false;
    std::uint32_t value = 0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return false;
    out = value;
    return value <= 65535;
}

bool parse_ipv4(std::string_view text, std::array<std::uint32_t, 4>& octets) {
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        if (i > 0) {
            if (pos >= text.size() || text[pos] != '.') return false;
            ++pos;
        }
        std::size_t start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        std::size_t len = pos - start;
        if (len == 0 || len > 3) return false;
        std::uint32_t value = 0;
        std::from_chars(text.data() + start, text.data() + pos, value);
        if (value > 255) return false;
        octets[static_cast<std::size_t>(i)] = value;
    }
    return pos == text.size();
}

}  // namespace

std::string_view attribute_kind_name(AttributeKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<AttributeKind> attribute_kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) return static_cast<AttributeKind>(i);
    }
    return std::nullopt;
}

std::string Item::to_string() const {
    std::string out(attribute_kind_name(attribute));
    out += '=';
    out += value;
    return out;
}

bool item_value_valid(AttributeKind kind, std::string_view value) {
    switch (kind) {
        case AttributeKind::SrcIp:
        case AttributeKind::DstIp: {
            std::array<std::uint32_t, 4> octets{};
            return parse_ipv4(value, octets);
        }
        case AttributeKind::SrcPort:
        case AttributeKind::DstPort: {
            std::uint32_t port = 0;
            return parse_port(value, port);
        }
        case AttributeKind::Protocol:
            return value == "TCP" || value == "UDP";
        case AttributeKind::Label:
            return value == "INTRUSION" || value == "NORMAL";
    }
    return false;
}

Item make_item(AttributeKind kind, std::string_view value) {
    switch (kind) {
        case AttributeKind::SrcIp:
        case AttributeKind::DstIp: {
            std::array<std::uint32_t, 4> octets{};
            if (!parse_ipv4(value, octets)) {
                throw InvalidItemError("invalid IPv4 address for " +
                                       std::string(attribute_kind_name(kind)) +
                                       ": '" + std::string(value) + "'");
            }
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", octets[0], octets[1],
                          octets[2], octets[3]);
            return Item{kind, buf};
        }
        case AttributeKind::SrcPort:
        case AttributeKind::DstPort: {
            std::uint32_t port = 0;
            if (!parse_port(value, port)) {
                throw InvalidItemError("invalid port for " +
                                       std::string(attribute_kind_name(kind)) +
                                       ": '" + std::string(value) + "'");
            }
            return Item{kind, std::to_string(port)};
        }
        case AttributeKind::Protocol:
        case AttributeKind::Label: {
            if (!item_value_valid(kind, value)) {
                throw InvalidItemError("invalid value for " +
                                       std::string(attribute_kind_name(kind)) +
                                       ": '" + std::string(value) + "'");
            }
            return Item{kind, std::string(value)};
        }
    }
    throw InvalidItemError("unknown attribute kind");
}

Item parse_item(std::string_view text) {
    std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw InvalidItemError("item missing '=': '" + std::string(text) + "'");
    }
    auto kind = attribute_kind_from_name(text.substr(0, eq));
    if (!kind) {
        throw InvalidItemError("unknown attribute: '" +
                               std::string(text.substr(0, eq)) + "'");
    }
    return make_item(*kind, text.substr(eq + 1));
}

std::size_t ItemCatalog::ItemHash::operator()(const Item& item) const {
    // FNV-1a over kind byte + value bytes.
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 1099511628211ULL;
    };
    mix(static_cast<unsigned char>(item.attribute));
    for (char c : item.value) mix(static_cast<unsigned char>(c));
    return static_cast<std::size_t>(h);
}

ItemCatalog::ItemCatalog(const ItemCatalog& other) {
    std::lock_guard lock(other.mutex_);
    ids_ = other.ids_;
    items_ = other.items_;
}

ItemCatalog::ItemCatalog(ItemCatalog&& other) noexcept {
    std::lock_guard lock(other.mutex_);
    ids_ = std::move(other.ids_);
    items_ = std::move(other.items_);
}

ItemCatalog& ItemCatalog::operator=(const ItemCatalog& other) {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        ids_ = other.ids_;
        items_ = other.items_;
    }
    return *this;
}

ItemCatalog& ItemCatalog::operator=(ItemCatalog&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        ids_ = std::move(other.ids_);
        items_ = std::move(other.items_);
    }
    return *this;
}

ItemId ItemCatalog::intern(const Item& item) {
    if (!item_value_valid(item.attribute, item.value)) {
        throw InvalidItemError("invalid value for " +
                               std::string(attribute_kind_name(item.attribute)) +
                               ": '" + item.value + "'");
    }
    std::lock_guard lock(mutex_);
    auto it = ids_.find(item);
    if (it != ids_.end()) return ItemId{it->second};
    auto id = static_cast<std::uint32_t>(items_.size());
    items_.push_back(item);
    ids_.emplace(item, id);
    return ItemId{id};
}

ItemId ItemCatalog::intern(AttributeKind kind, std::string_view value) {
    return intern(make_item(kind, value));
}

std::optional<ItemId> ItemCatalog::find(const Item& item) const {
    std::lock_guard lock(mutex_);
    auto it = ids_.find(item);
    if (it == ids_.end()) return std::nullopt;
    return ItemId{it->second};
}

Item ItemCatalog::resolve(ItemId id) const {
    std::lock_guard lock(mutex_);
    return items_.at(id.value);
}

std::size_t ItemCatalog::size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
}

Itemset Itemset::from_unsorted(std::vector<ItemId> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return Itemset(std::move(ids));
}

Itemset Itemset::from_sorted(std::vector<ItemId> ids) {
    for (std::size_t i = 1; i < ids.size(); ++i) {
        if (!(ids[i - 1] < ids[i])) {
            throw Error("itemset ids not strictly ascending");
        }
    }
    return Itemset(std::move(ids));
}

bool Itemset::contains(ItemId id) const {
    return std::binary_search(items_.begin(), items_.end(), id);
}

bool Itemset::contains_all(const Itemset& other) const {
    return std::includes(items_.begin(), items_.end(), other.items_.begin(),
                         other.items_.end());
}

Itemset Itemset::unite(const Itemset& other) const {
    std::vector<ItemId> merged;
    merged.reserve(items_.size() + other.items_.size());
    std::set_union(items_.begin(), items_.end(), other.items_.begin(),
                   other.items_.end(), std::back_inserter(merged));
    return Itemset(std::move(merged));
}

Itemset Itemset::minus(const Itemset& other) const {
    std::vector<ItemId> rest;
    rest.reserve(items_.size());
    std::set_difference(items_.begin(), items_.end(), other.items_.begin(),
                        other.items_.end(), std::back_inserter(rest));
    return Itemset(std::move(rest));
}

std::string render_itemset(const Itemset& itemset, const ItemCatalog& catalog) {
    std::string out;
    bool first = true;
    for (ItemId id : itemset.items()) {
        if (!first) out += ',';
        first = false;
        out += catalog.resolve(id).to_string();
    }
    return out;
}

std::string TransactionDatabase::to_text() const {
    std::string out;
    for (const Transaction& t : transactions) {
        out += std::to_string(t.tid);
        out += '\t';
        out += render_itemset(t.items, catalog);
        out += '\n';
    }
    return out;
}

}  // namespace aprifire
