#include "ivmc/engine/database.hpp"

#include "ivmc/core/error.hpp"

#include <algorithm>

namespace ivmc {

Tuple TableIndex::key_of(const Tuple &row) const {
	Tuple key;
	key.reserve(columns.size());
	for (auto c : columns) {
		key.push_back(row[c]);
	}
	return key;
}

const TableIndex *Table::unique_index_on(const std::vector<std::size_t> &columns) const {
	auto wanted = columns;
	std::sort(wanted.begin(), wanted.end());
	for (const auto &idx : indexes) {
		auto have = idx.columns;
		std::sort(have.begin(), have.end());
		if (idx.unique && have == wanted) {
			return &idx;
		}
	}
	return nullptr;
}

const TableIndex *Table::first_unique_index() const {
	for (const auto &idx : indexes) {
		if (idx.unique) {
			return &idx;
		}
	}
	return nullptr;
}

const Table &Database::table(const std::string &name) const {
	auto it = tables_.find(name);
	if (it == tables_.end()) {
		throw Error(ErrorKind::BINDER, "unknown table " + name);
	}
	return it->second;
}

Table &Database::mutable_table(const std::string &name) {
	auto it = tables_.find(name);
	if (it == tables_.end()) {
		throw Error(ErrorKind::BINDER, "unknown table " + name);
	}
	return it->second;
}

std::vector<std::string> Database::table_names() const {
	std::vector<std::string> out;
	for (const auto &[name, _] : tables_) {
		out.push_back(name);
	}
	return out;
}

std::optional<Schema> Database::table_schema(const std::string &name) const {
	auto it = tables_.find(name);
	if (it == tables_.end()) {
		return std::nullopt;
	}
	return it->second.schema;
}

void Database::journal(UndoEntry entry) {
	if (in_transaction_) {
		journal_.push_back(std::move(entry));
	}
}

void Database::create_table(const Schema &schema, bool if_not_exists) {
	check_fault("create table");
	if (auto it = tables_.find(schema.name); it != tables_.end()) {
		bool same = it->second.schema.columns.size() == schema.columns.size();
		for (std::size_t i = 0; same && i < schema.columns.size(); ++i) {
			same = it->second.schema.columns[i].name == schema.columns[i].name &&
			       it->second.schema.columns[i].type == schema.columns[i].type;
		}
		if (if_not_exists && same) {
			return;
		}
		throw Error(ErrorKind::COLLISION, "table " + schema.name + " already exists");
	}
	schema.check_unique_names();
	Table t;
	t.schema = schema;
	for (auto &c : t.schema.columns) {
		c.qualifier.clear();
	}
	tables_.emplace(schema.name, std::move(t));
	journal({UndoEntry::Kind::TABLE_CREATED, schema.name, {}, 0, std::nullopt});
}

void Database::create_index(const std::string &name, const std::string &table, const std::vector<std::string> &columns,
                            bool unique) {
	check_fault("create index");
	Table &t = mutable_table(table);
	for (const auto &[_, other] : tables_) {
		for (const auto &idx : other.indexes) {
			if (idx.name == name) {
				throw Error(ErrorKind::COLLISION, "index " + name + " already exists");
			}
		}
	}
	TableIndex idx;
	idx.name = name;
	idx.unique = unique;
	for (const auto &c : columns) {
		idx.columns.push_back(t.schema.index_of(c));
	}
	if (unique) {
		for (const auto &[row, count] : t.rows) {
			auto [it, inserted] = idx.entries.emplace(idx.key_of(row), row);
			if (!inserted || count > 1) {
				throw Error(ErrorKind::CONSTRAINT, "cannot create unique index " + name + ": duplicate key " +
				                                       tuple_to_string(idx.key_of(row)) + " in " + table);
			}
		}
	}
	t.indexes.push_back(std::move(idx));
	journal({UndoEntry::Kind::INDEX_CREATED, table, {}, 0, std::nullopt});
}

void Database::drop_table(const std::string &name) {
	check_fault("drop table");
	auto it = tables_.find(name);
	if (it == tables_.end()) {
		throw Error(ErrorKind::BINDER, "unknown table " + name);
	}
	UndoEntry entry {UndoEntry::Kind::TABLE_DROPPED, name, {}, 0, std::nullopt};
	if (in_transaction_) {
		entry.dropped = std::move(it->second);
	}
	tables_.erase(it);
	journal(std::move(entry));
}

void Database::apply_rows(Table &t, const Tuple &row, std::int64_t copies) {
	auto it = t.rows.find(row);
	std::int64_t before = it == t.rows.end() ? 0 : it->second;
	std::int64_t after = before + copies;
	if (after == 0) {
		if (it != t.rows.end()) {
			t.rows.erase(it);
		}
	} else if (it == t.rows.end()) {
		t.rows.emplace(row, after);
	} else {
		it->second = after;
	}
	t.row_count += copies;
	if (before == 0 && after > 0) {
		for (auto &idx : t.indexes) {
			if (idx.unique) {
				idx.entries.emplace(idx.key_of(row), row);
			}
		}
	} else if (before > 0 && after == 0) {
		for (auto &idx : t.indexes) {
			if (idx.unique) {
				idx.entries.erase(idx.key_of(row));
			}
		}
	}
}

void Database::insert_row(const std::string &table, const Tuple &row, std::int64_t copies) {
	check_fault("insert");
	if (copies <= 0) {
		return;
	}
	Table &t = mutable_table(table);
	check_tuple(t.schema, row);
	for (const auto &idx : t.indexes) {
		if (!idx.unique) {
			continue;
		}
		auto existing = idx.entries.find(idx.key_of(row));
		if (existing != idx.entries.end() || copies > 1) {
			throw Error(ErrorKind::CONSTRAINT, "duplicate key " + tuple_to_string(idx.key_of(row)) +
			                                       " violates unique index " + idx.name + " on " + table);
		}
	}
	apply_rows(t, row, copies);
	journal({UndoEntry::Kind::ROWS, table, row, copies, std::nullopt});
}

void Database::erase_row(const std::string &table, const Tuple &row, std::int64_t copies) {
	check_fault("delete");
	if (copies <= 0) {
		return;
	}
	Table &t = mutable_table(table);
	auto it = t.rows.find(row);
	std::int64_t stored = it == t.rows.end() ? 0 : it->second;
	if (stored < copies) {
		throw Error(ErrorKind::NEGATIVE_STATE, "deleting " + std::to_string(copies) + " cop" +
		                                           (copies == 1 ? "y" : "ies") + " of " + tuple_to_string(row) +
		                                           " from " + table + ", which holds " + std::to_string(stored));
	}
	apply_rows(t, row, -copies);
	journal({UndoEntry::Kind::ROWS, table, row, -copies, std::nullopt});
}

std::int64_t Database::erase_all(const std::string &table, const Tuple &row) {
	const Table &t = this->table(table);
	auto it = t.rows.find(row);
	if (it == t.rows.end()) {
		return 0;
	}
	std::int64_t n = it->second;
	erase_row(table, row, n);
	return n;
}

void Database::clear_table(const std::string &table) {
	check_fault("clear");
	Table &t = mutable_table(table);
	if (in_transaction_) {
		for (const auto &[row, count] : t.rows) {
			journal_.push_back({UndoEntry::Kind::ROWS, table, row, -count, std::nullopt});
		}
	}
	t.rows.clear();
	t.row_count = 0;
	for (auto &idx : t.indexes) {
		idx.entries.clear();
	}
}

void Database::begin() {
	if (in_transaction_) {
		throw Error(ErrorKind::INTERNAL, "transaction already open");
	}
	in_transaction_ = true;
	journal_.clear();
}

void Database::commit() {
	if (!in_transaction_) {
		throw Error(ErrorKind::INTERNAL, "no open transaction");
	}
	in_transaction_ = false;
	journal_.clear();
}

void Database::rollback_to(std::size_t savepoint) {
	while (journal_.size() > savepoint) {
		UndoEntry e = std::move(journal_.back());
		journal_.pop_back();
		switch (e.kind) {
		case UndoEntry::Kind::ROWS:
			apply_rows(tables_.at(e.table), e.row, -e.copies);
			break;
		case UndoEntry::Kind::TABLE_CREATED:
			tables_.erase(e.table);
			break;
		case UndoEntry::Kind::TABLE_DROPPED:
			tables_.emplace(e.table, std::move(*e.dropped));
			break;
		case UndoEntry::Kind::INDEX_CREATED:
			tables_.at(e.table).indexes.pop_back();
			break;
		}
	}
}

void Database::rollback() {
	if (!in_transaction_) {
		throw Error(ErrorKind::INTERNAL, "no open transaction");
	}
	rollback_to(0);
	in_transaction_ = false;
}

ZSetRelation Database::relation(const std::string &table) const {
	const Table &t = this->table(table);
	ZSetRelation out(t.schema);
	out.reserve(static_cast<std::size_t>(t.row_count));
	for (const auto &[row, count] : t.rows) {
		out.add_copies(row, Multiplicity::insertion(), count);
	}
	return out;
}

std::string Database::fingerprint() const {
	std::string out;
	for (const auto &[name, t] : tables_) {
		out += "table " + name + " (";
		for (std::size_t i = 0; i < t.schema.columns.size(); ++i) {
			out += (i ? ", " : "") + t.schema.columns[i].name + " " + scalar_type_name(t.schema.columns[i].type);
		}
		out += ") rows=" + std::to_string(t.row_count) + "\n";
		for (const auto &[row, count] : t.rows) {
			out += "  " + tuple_to_string(row) + " x" + std::to_string(count) + "\n";
		}
		for (const auto &idx : t.indexes) {
			out += "  index " + idx.name + (idx.unique ? " unique" : "") + " [";
			for (std::size_t i = 0; i < idx.columns.size(); ++i) {
				out += (i ? "," : "") + std::to_string(idx.columns[i]);
			}
			out += "] entries=" + std::to_string(idx.entries.size()) + "\n";
		}
	}
	return out;
}

} // namespace ivmc
