package db;

/** Schema migrations. */
public class Schema {
    public void addColumn(String table, String column) {
        runQuery("alter table " + table + " add column " + column);
    }

    public void createIndex(String table, String column) {
        runQuery("create index on " + table);
    }

    private void runQuery(String sql) {
        // hands the statement to the driver inside a transaction
    }
}
