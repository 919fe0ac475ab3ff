class Helper {
    public Helper() {}
}

public class Solution {
    private static Solution instance = new Solution();

    private Solution() {}

    public static Solution getInstance() {
        return instance;
    }
}
