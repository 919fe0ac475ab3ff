public class Configuration {
    private static final Configuration INSTANCE = new Configuration();

    private final java.util.Map<String, String> values = new java.util.HashMap<>();

    private Configuration() {
    }

    public static Configuration getInstance() {
        return INSTANCE;
    }

    public String get(String key) {
        return values.get(key);
    }

    public void set(String key, String value) {
        values.put(key, value);
    }
}
