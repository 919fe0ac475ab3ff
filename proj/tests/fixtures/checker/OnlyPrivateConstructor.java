public final class MathUtils {
    private MathUtils() {
        throw new AssertionError();
    }

    public static int square(int x) {
        return x * x;
    }
}
