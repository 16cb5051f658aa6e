#pragma once

#include "ivmc/emit/render.hpp"
#include "ivmc/ivm/rewriter.hpp"
#include "ivmc/plan/plan.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ivmc {

enum class Materialization : std::uint8_t {
	/// The delta expression is recomputed inline inside the upsert.
	NONE,
	/// The delta view is materialized into a standing `delta_<view>` table first.
	EAGER
};

const char *materialization_name(Materialization m);
Materialization parse_materialization(std::string_view name);
const char *emptiness_name(EmptinessMode m);
EmptinessMode parse_emptiness(std::string_view name);

struct CompileOptions {
	Dialect dialect = Dialect::GENERIC;
	std::string mult_column = DEFAULT_MULT_COLUMN;
	Materialization materialize = Materialization::EAGER;
	EmptinessMode emptiness = EmptinessMode::PAPER;
};

/// A registered materialized view together with everything derived from its definition.
struct ViewDefinition {
	std::string name;
	std::string source_sql;
	SelectQuery query;
	PlanNode plan;
	QueryClass query_class = QueryClass::PROJECTION_FILTER;
	IncrementalPlan incremental;
	CompileOptions options;
	std::vector<std::string> base_tables;
	/// Stored view table: visible columns first, then hidden maintenance columns.
	Schema view_schema;
	std::size_t visible_columns = 0;
	/// Upsert key of the view table (group keys, or every visible column for bag views).
	std::vector<std::string> key_columns;

	std::string delta_view_table() const {
		return delta_table_name(name);
	}
	bool has_delta_view_table() const {
		return options.materialize == Materialization::EAGER;
	}
};

/// Runs plan -> classify -> bind deltas -> incremental rewrite for one view query.
ViewDefinition define_view(const std::string &name, const std::string &source_sql, const SelectQuery &query,
                           const SchemaProvider &catalog, const CompileOptions &options);

/// Statement trees for the delta query (step 1) and the merge (steps 2 and 3), before packaging into
/// DDL and propagation lists. Raises UNSUPPORTED for plans with no SQL lowering.
std::vector<Statement> lower_to_ast(const ViewDefinition &view);

/// Delta tables, view table, optional delta-view table, initial load of the view and its unique
/// index. Raises COLLISION when the view or delta-view table already exists in `existing`.
std::vector<Statement> emit_ddl(const ViewDefinition &view, const SchemaProvider &existing);

/// The ordered propagation steps: fill the delta view, upsert into the view, delete dead rows, clear
/// the delta view. With materialization NONE the first step is folded into the upsert as a CTE and
/// there is no delta view to clear.
std::vector<Statement> emit_propagation(const ViewDefinition &view);

/// Statements that empty the base delta tables once every dependent view has been propagated.
std::vector<Statement> emit_drain(const ViewDefinition &view);

struct ScriptBundle {
	std::vector<Statement> ddl;
	std::vector<Statement> propagation;
	std::vector<Statement> drain;
	std::string ddl_sql;
	std::string propagate_sql;
	std::string metadata_json;
};

ScriptBundle build_bundle(const ViewDefinition &view, const SchemaProvider &existing);

/// Writes `<dir>/<view>/{ddl.sql,propagate.sql,metadata.json}` and returns the three paths.
std::vector<std::filesystem::path> write_bundle(const ViewDefinition &view, const ScriptBundle &bundle,
                                                const std::filesystem::path &dir);

/// Result of compiling a schema script plus a script of CREATE [MATERIALIZED] VIEW statements.
struct CompiledView {
	ViewDefinition view;
	ScriptBundle bundle;
};

std::vector<CompiledView> compile_views(const std::string &schema_sql, const std::string &views_sql,
                                        const CompileOptions &options);

} // namespace ivmc
