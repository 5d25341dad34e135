#pragma once

#include <compare>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aprifire/error.hpp"

namespace aprifire {

// The six categorical attribute kinds an event projects onto.
enum class AttributeKind : std::uint8_t {
    SrcIp = 0,
    DstIp = 1,
    SrcPort = 2,
    DstPort = 3,
    Protocol = 4,
    Label = 5,
};

inline constexpr std::size_t kAttributeKindCount = 6;

std::string_view attribute_kind_name(AttributeKind kind);
std::optional<AttributeKind> attribute_kind_from_name(std::string_view name);

// One categorical attribute=value token, e.g. dst_ip=192.168.1.154.
// Equality is (attribute, value) equality; the value string is kept in a
// canonical rendering (see canonicalize below) so equal observations compare
// equal.
struct Item {
    AttributeKind attribute;
    std::string value;

    bool operator==(const Item& other) const = default;
    auto operator<=>(const Item& other) const = default;

    // "attr=value" rendering used by dumps and diagnostics.
    std::string to_string() const;
};

// Syntax check for a value against its attribute kind: dotted-quad for IPs,
// decimal 0-65535 for ports, TCP|UDP for protocol, INTRUSION|NORMAL for label.
bool item_value_valid(AttributeKind kind, std::string_view value);

// Validates and canonicalizes (strips leading zeros from ports, re-renders
// IPs from parsed octets). Throws InvalidItemError on bad syntax.
Item make_item(AttributeKind kind, std::string_view value);

// Parses the "attr=value" rendering produced by Item::to_string.
Item parse_item(std::string_view text);

// Dense identifier handed out by an ItemCatalog. The total order on ids is
// fixed for the catalog's lifetime; every itemset stores ids strictly
// ascending.
struct ItemId {
    std::uint32_t value = 0;

    bool operator==(const ItemId&) const = default;
    auto operator<=>(const ItemId&) const = default;
};

// Bidirectional Item <-> ItemId association. Interning is thread-safe; ids
// are assigned densely in first-seen order, so the mapping is deterministic
// for a fixed interning sequence and injective both ways.
class ItemCatalog {
public:
    ItemCatalog() = default;
    ItemCatalog(const ItemCatalog& other);
    ItemCatalog(ItemCatalog&& other) noexcept;
    ItemCatalog& operator=(const ItemCatalog& other);
    ItemCatalog& operator=(ItemCatalog&& other) noexcept;

    // Returns the existing id for an already-interned item, otherwise assigns
    // the next dense id. Throws InvalidItemError if the value fails the
    // attribute's syntax.
    ItemId intern(const Item& item);
    ItemId intern(AttributeKind kind, std::string_view value);

    // Lookup without interning.
    std::optional<ItemId> find(const Item& item) const;

    // Returns a copy: references into the store would not survive a
    // concurrent intern's reallocation.
    Item resolve(ItemId id) const;
    std::size_t size() const;

private:
    struct ItemHash {
        std::size_t operator()(const Item& item) const;
    };

    mutable std::mutex mutex_;
    std::unordered_map<Item, std::uint32_t, ItemHash> ids_;
    std::vector<Item> items_;
};

// A set of ItemIds stored as a strictly ascending sequence. The empty set is
// representable (it is the recursion base for subset enumeration) but is
// never reported as frequent.
class Itemset {
public:
    Itemset() = default;

    // Sorts and deduplicates.
    static Itemset from_unsorted(std::vector<ItemId> ids);
    // Requires strictly ascending input; cheap wrap for already-ordered data.
    static Itemset from_sorted(std::vector<ItemId> ids);

    std::span<const ItemId> items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    bool contains(ItemId id) const;
    // True iff every id of `other` appears in this set (merge walk).
    bool contains_all(const Itemset& other) const;

    // Set union / difference, both preserving the ascending order invariant.
    Itemset unite(const Itemset& other) const;
    Itemset minus(const Itemset& other) const;

    bool operator==(const Itemset&) const = default;
    // Lexicographic on the id sequence; used for deterministic output orders.
    auto operator<=>(const Itemset& other) const {
        return items_ <=> other.items_;
    }

private:
    explicit Itemset(std::vector<ItemId> ids) : items_(std::move(ids)) {}
    std::vector<ItemId> items_;
};

// One transaction: a nonempty itemset tagged with a unique tid.
struct Transaction {
    std::uint64_t tid = 0;
    Itemset items;
};

// True iff the transaction contains every item of the itemset.
inline bool contains(const Transaction& transaction, const Itemset& itemset) {
    return transaction.items.contains_all(itemset);
}

// The ordered collection of transactions plus the catalog their ids resolve
// in. Immutable after construction in practice; safe to share across threads.
struct TransactionDatabase {
    std::vector<Transaction> transactions;
    ItemCatalog catalog;

    std::size_t size() const { return transactions.size(); }

    // "tid<TAB>item,item,..." per line; used by determinism checks and
    // debugging.
    std::string to_text() const;
};

// Renders an itemset through a catalog as "attr=value,attr=value" in id
// order.
std::string render_itemset(const Itemset& itemset, const ItemCatalog& catalog);

}  // namespace aprifire
