public class Bank {
    private static Bank primary, backup;
    private int balance = 0, limit = 10;

    private Bank() {}

    public static Bank getInstance() {
        if (primary == null) primary = new Bank();
        return primary;
    }
}
