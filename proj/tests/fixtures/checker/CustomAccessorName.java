public class Database {
    private static Database db;

    private Database() {}

    public static Database connect() {
        if (db == null) db = new Database();
        return db;
    }
}
