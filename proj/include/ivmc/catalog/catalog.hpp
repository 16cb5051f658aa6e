#pragma once

#include "ivmc/emit/emitter.hpp"
#include "ivmc/engine/database.hpp"
#include "ivmc/engine/executor.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace ivmc {

enum class RefreshPolicy : std::uint8_t {
	/// Views are refreshed right after every applied change batch.
	EAGER,
	/// Views are refreshed when queried (or on an explicit refresh).
	LAZY
};

const char *refresh_policy_name(RefreshPolicy p);
RefreshPolicy parse_refresh_policy(std::string_view name);

struct CatalogConfig {
	CompileOptions compile;
	RefreshPolicy refresh = RefreshPolicy::LAZY;
};

enum class TableRole : std::uint8_t { BASE, DELTA, VIEW, DELTA_VIEW };

enum class ChangeAction : std::uint8_t { INSERT, DELETE };

/// One captured base-table change. `row` follows the table's column order.
struct ChangeRecord {
	std::string table;
	ChangeAction action = ChangeAction::INSERT;
	Tuple row;
};

struct RegisteredView {
	ViewDefinition definition;
	std::string ddl_sql;
	std::string propagate_sql;
	std::string metadata_json;
	/// Parsed from `propagate_sql`; this is what refresh executes.
	std::vector<Statement> propagation;
	std::vector<Statement> drain;
};

struct StepTiming {
	std::string view;
	/// 1-based position in the view's propagation script.
	std::size_t step = 0;
	std::string statement;
	std::int64_t rows = 0;
	double millis = 0;
};

struct RefreshReport {
	/// Every view refreshed together (the requested view plus views sharing its base tables).
	std::vector<std::string> views;
	/// Delta-table rows consumed.
	std::int64_t rows_propagated = 0;
	std::map<std::string, std::int64_t> delta_rows;
	std::vector<StepTiming> steps;
	double integrate_millis = 0;
	double total_millis = 0;
};

struct IngestReport {
	std::int64_t records = 0;
	std::map<std::string, std::int64_t> inserts;
	std::map<std::string, std::int64_t> deletes;
	/// Filled when the refresh policy is eager.
	std::vector<RefreshReport> refreshes;
};

enum class ChangelogFormat : std::uint8_t { JSONL, CSV };

/// Tables, registered views and their persisted scripts, on top of the embedded engine. All public
/// operations are serialized through one mutex.
class Catalog : public SchemaProvider {
public:
	explicit Catalog(CatalogConfig config = {});

	const CatalogConfig &config() const {
		return config_;
	}
	void set_refresh_policy(RefreshPolicy p) {
		config_.refresh = p;
	}

	std::optional<Schema> table_schema(const std::string &name) const override;
	std::optional<TableRole> table_role(const std::string &name) const;
	Database &database() {
		return db_;
	}
	const Database &database() const {
		return db_;
	}

	void create_base_table(const Schema &schema);

	/// Compiles a CREATE MATERIALIZED VIEW statement, executes its DDL (including the initial load)
	/// in one transaction and records the view.
	const RegisteredView &register_view(const std::string &ddl_text);

	bool has_view(const std::string &name) const {
		return views_.count(name) != 0;
	}
	const RegisteredView &view(const std::string &name) const;
	std::vector<std::string> view_names() const {
		return view_order_;
	}
	/// Views reading `table`, in registration order.
	std::vector<std::string> dependents(const std::string &table) const;

	/// Builds a change record from column values; raises BINDER/TYPE when they do not cover the table
	/// schema exactly.
	ChangeRecord make_change(const std::string &table, ChangeAction action,
	                         const std::map<std::string, Value> &values) const;

	/// Appends the batch to the delta tables (base tables without dependent views change directly)
	/// in one transaction. Under the eager policy, refreshes every affected view afterwards.
	IngestReport apply_base_changes(const std::vector<ChangeRecord> &changes);

	/// Reads a changelog stream. On a malformed record, the records before it are applied and a
	/// CHANGELOG error citing the line is raised.
	IngestReport ingest_changelog(std::istream &in, ChangelogFormat format);

	/// Runs the propagation scripts of `view` and every view sharing a base table with it, folds the
	/// deltas into the base tables and drains them, all in one transaction.
	RefreshReport refresh_view(const std::string &view);

	/// Visible view rows, with bag counts expanded into copies; refreshes first when `lazy`.
	ZSetRelation query_view(const std::string &view, bool lazy);

	/// Logical contents of a base table: stored rows plus pending deltas.
	ZSetRelation base_state(const std::string &table) const;

	/// Executes a SQL script: CREATE TABLE and CREATE MATERIALIZED VIEW register objects, INSERT and
	/// DELETE on base tables become change records, SELECT returns rows (views are refreshed first
	/// under the lazy policy and read with hidden columns removed).
	std::vector<ResultSet> execute_sql(const std::string &sql);

	/// Replaces the propagation script of a view (used to exercise the verifier with a broken script).
	void override_propagation(const std::string &view, const std::string &propagate_sql);

	/// Persists tables, rows and view bundles under `dir`.
	void save(const std::filesystem::path &dir) const;
	static std::unique_ptr<Catalog> load(const std::filesystem::path &dir);

private:
	RefreshReport refresh_group(const std::vector<std::string> &group);
	std::vector<std::string> group_of(const std::string &view) const;
	IngestReport apply_unlocked(const std::vector<ChangeRecord> &changes);
	void check_base_table(const std::string &table) const;
	ZSetRelation view_state(const RegisteredView &v) const;
	ResultSet view_result(const RegisteredView &v) const;
	/// Runs a read-only query with views and pending base deltas resolved to their logical contents.
	ResultSet read_query(const SelectQuery &query);
	std::vector<Statement> parse_propagation(const std::string &sql) const;

	CatalogConfig config_;
	Database db_;
	std::map<std::string, TableRole> roles_;
	std::map<std::string, RegisteredView> views_;
	std::vector<std::string> view_order_;
	mutable std::recursive_mutex mutex_;
};

} // namespace ivmc
