public class Pool {
    private static Pool instance;
    private final int size;

    private Pool() { this(8); }

    public Pool(int size) { this.size = size; }

    public static Pool getInstance() {
        if (instance == null) instance = new Pool();
        return instance;
    }
}
