import db.OrderRepository;
import net.HttpClient;
import ui.Screen;

public class App {
    public static void main(String[] args) {
        System.out.println("starting");
    }
}
