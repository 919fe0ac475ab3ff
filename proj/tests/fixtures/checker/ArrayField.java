public class Table {
    private static Table[] instances = new Table[1];

    private Table() {}

    public static Table[] all() {
        return instances;
    }
}
