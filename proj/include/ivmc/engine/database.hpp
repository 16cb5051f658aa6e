#pragma once

#include "ivmc/core/zset.hpp"
#include "ivmc/plan/plan.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ivmc {

struct TableIndex {
	std::string name;
	std::vector<std::size_t> columns;
	bool unique = false;
	/// Key values -> stored row (unique indexes only).
	std::unordered_map<Tuple, Tuple, TupleHash> entries;

	Tuple key_of(const Tuple &row) const;
};

/// A stored table: a multiset of rows kept as row -> number of copies.
struct Table {
	Schema schema;
	std::map<Tuple, std::int64_t> rows;
	std::vector<TableIndex> indexes;
	std::int64_t row_count = 0;

	/// Unique index whose columns are exactly `columns` (any order), if one exists.
	const TableIndex *unique_index_on(const std::vector<std::size_t> &columns) const;
	const TableIndex *first_unique_index() const;
};

/// In-memory database with single-level transactions backed by an undo journal. Every mutation
/// first calls the fault hook, which tests use to abort at a chosen point.
class Database : public SchemaProvider {
public:
	using FaultHook = std::function<void(const char *site)>;

	bool has_table(const std::string &name) const {
		return tables_.count(name) != 0;
	}
	const Table &table(const std::string &name) const;
	std::vector<std::string> table_names() const;
	std::optional<Schema> table_schema(const std::string &name) const override;

	/// Raises COLLISION when the table exists, unless `if_not_exists` and the schema is compatible.
	void create_table(const Schema &schema, bool if_not_exists = false);
	/// Raises CONSTRAINT when a unique index would be violated by existing rows.
	void create_index(const std::string &name, const std::string &table, const std::vector<std::string> &columns,
	                  bool unique);
	void drop_table(const std::string &name);

	/// Adds copies of a row, type-checked against the schema; raises CONSTRAINT on a unique-key clash.
	void insert_row(const std::string &table, const Tuple &row, std::int64_t copies = 1);
	/// Removes copies of a row; raises NEGATIVE_STATE when fewer are stored.
	void erase_row(const std::string &table, const Tuple &row, std::int64_t copies = 1);
	/// Removes every copy of a row and returns how many there were.
	std::int64_t erase_all(const std::string &table, const Tuple &row);
	void clear_table(const std::string &table);

	void begin();
	void commit();
	void rollback();
	bool in_transaction() const {
		return in_transaction_;
	}

	/// Journal position for statement-level rollback inside a transaction.
	std::size_t savepoint() const {
		return journal_.size();
	}
	void rollback_to(std::size_t savepoint);

	void set_fault_hook(FaultHook hook) {
		fault_hook_ = std::move(hook);
	}
	void check_fault(const char *site) const {
		if (fault_hook_) {
			fault_hook_(site);
		}
	}

	/// Table contents as a flagged relation (one entry per copy).
	ZSetRelation relation(const std::string &table) const;

	/// Canonical dump of every table (schema, rows with counts, indexes); equal fingerprints mean
	/// identical state.
	std::string fingerprint() const;

private:
	struct UndoEntry {
		enum class Kind : std::uint8_t { ROWS, TABLE_CREATED, TABLE_DROPPED, INDEX_CREATED };
		Kind kind = Kind::ROWS;
		std::string table;
		Tuple row;
		/// Copies added by the journaled operation (negative when removed).
		std::int64_t copies = 0;
		std::optional<Table> dropped;
	};

	Table &mutable_table(const std::string &name);
	void apply_rows(Table &t, const Tuple &row, std::int64_t copies);
	void journal(UndoEntry entry);

	std::map<std::string, Table> tables_;
	std::vector<UndoEntry> journal_;
	bool in_transaction_ = false;
	FaultHook fault_hook_;
};

/// Begins a transaction on construction and rolls it back on destruction unless committed.
class Transaction {
public:
	explicit Transaction(Database &db) : db_(db) {
		db_.begin();
	}
	~Transaction() {
		if (!done_) {
			db_.rollback();
		}
	}
	Transaction(const Transaction &) = delete;
	Transaction &operator=(const Transaction &) = delete;

	void commit() {
		db_.commit();
		done_ = true;
	}

private:
	Database &db_;
	bool done_ = false;
};

} // namespace ivmc
